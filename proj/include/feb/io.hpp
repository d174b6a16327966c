#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "feb/eval.hpp"
#include "feb/fuzzify.hpp"
#include "feb/kb.hpp"
#include "feb/learn.hpp"
#include "feb/semantics.hpp"

namespace feb {

namespace io {

// ---------------------------------------------------------------------------
// Lexing and number formatting

namespace detail {

/// Splits a line into tokens; '(' ')' '=' are single-character tokens,
/// '#' starts a comment.
inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : line) {
    if (ch == '#') break;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      flush();
    } else if (ch == '(' || ch == ')' || ch == '=') {
      flush();
      tokens.emplace_back(1, ch);
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return tokens;
}

inline std::optional<double> try_parse_number(const std::string& token) {
  if (token.empty()) return std::nullopt;
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + token.size()) return std::nullopt;
  return v;
}

inline bool is_integer_token(const std::string& token) {
  if (token.empty()) return false;
  std::size_t i = token[0] == '-' || token[0] == '+' ? 1 : 0;
  if (i == token.size()) return false;
  for (; i < token.size(); ++i)
    if (token[i] < '0' || token[i] > '9') return false;
  return true;
}

/// Hexadecimal float with 0x prefix; exact round trip through strtod.
inline std::string format_hex(double v) {
  char buf[48];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::hex);
  std::string body(buf, end);
  if (!body.empty() && body[0] == '-') return "-0x" + body.substr(1);
  return "0x" + body;
}

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Concept expressions (the `and` / `some` / `=` surface syntax)

namespace detail {

/// Recursive-descent parser over a token stream. When a knowledge base is
/// given, property kinds are validated; otherwise (hypothesis files) data
/// restrictions are recognized through the datatype label map.
class ConceptParser {
 public:
  ConceptParser(const std::vector<std::string>& tokens, std::size_t line,
                const KnowledgeBase* kb,
                const std::map<std::string, DatatypePredicate>* labels)
      : tokens_(tokens), line_(line), kb_(kb), labels_(labels) {}

  Concept parse() {
    Concept c = parse_expression();
    if (!at_end()) fail("unexpected trailing token '" + peek() + "'");
    return c;
  }

  /// Parses a concept, stopping at the first token that cannot continue it.
  Concept parse_expression() {
    std::vector<Concept> conjuncts{parse_conjunct()};
    while (!at_end() && peek() == "and") {
      ++pos_;
      conjuncts.push_back(parse_conjunct());
    }
    if (conjuncts.size() == 1) return std::move(conjuncts.front());
    return Concept::conj(std::move(conjuncts));
  }

  std::size_t position() const { return pos_; }
  bool at_end() const { return pos_ >= tokens_.size(); }

 private:
  Concept parse_conjunct() {
    if (at_end()) fail("expected a concept expression");
    const std::string tok = next();
    if (tok == "top") return Concept::top();
    if (tok == "bottom") return Concept::bottom();
    if (tok == "(") {
      Concept inner = parse_parenthesized();
      expect(")");
      return inner;
    }
    if (tok == ")" || tok == "and" || tok == "=") fail("unexpected token '" + tok + "'");
    return make_atom(tok);
  }

  Concept parse_parenthesized() {
    if (at_end()) fail("unterminated '('");
    // Restriction forms start with a property name followed by 'some' or '='.
    if (pos_ + 1 < tokens_.size() && tokens_[pos_] != "(" &&
        (tokens_[pos_ + 1] == "some" || tokens_[pos_ + 1] == "=")) {
      const std::string prop = next();
      const std::string op = next();
      if (op == "=") return parse_data_equality(prop);
      return parse_some(prop);
    }
    return parse_expression(); // grouping parentheses
  }

  Concept parse_data_equality(const std::string& prop) {
    if (at_end()) fail("expected a literal after '='");
    const std::string tok = next();
    Literal lit;
    if (tok == "true" || tok == "false") {
      lit = Literal::of_bool(tok == "true");
    } else if (auto num = try_parse_number(tok)) {
      lit = is_integer_token(tok) ? Literal::integer(static_cast<long long>(*num))
                                  : Literal::real(*num);
    } else {
      fail("expected a literal after '=', got '" + tok + "'");
    }
    if (kb_ && !kb_->is_data_property(prop)) fail("undeclared data property: " + prop);
    if (kb_) {
      const bool want_bool = kb_->is_boolean_data_property(prop);
      if (want_bool != (lit.type == Literal::Type::Bool))
        fail("literal type does not match the declaration of " + prop);
    }
    return Concept::some_data(prop, DatatypePredicate::equals(lit));
  }

  Concept parse_some(const std::string& prop) {
    if (kb_ && kb_->is_data_property(prop)) {
      const std::string label = next_identifier("datatype label");
      return Concept::some_data(prop, lookup_label(label));
    }
    if (kb_) {
      if (!kb_->is_object_property(prop)) fail("undeclared property: " + prop);
      return Concept::some(prop, parse_conjunct_or_group());
    }
    // Without a KB: a bare identifier that names a known fuzzy datatype is a
    // data restriction, everything else is an object restriction.
    if (!at_end() && peek() != "(" && labels_ && labels_->count(peek())) {
      const std::string label = next();
      return Concept::some_data(prop, labels_->at(label));
    }
    return Concept::some(prop, parse_conjunct_or_group());
  }

  /// Existential fillers: single conjunct, or a parenthesized expression.
  Concept parse_conjunct_or_group() { return parse_conjunct(); }

  Concept make_atom(const std::string& name) {
    if (kb_ && !kb_->is_class(name)) fail("undeclared concept name: " + name);
    return Concept::atom(name);
  }

  DatatypePredicate lookup_label(const std::string& label) {
    if (labels_) {
      auto it = labels_->find(label);
      if (it != labels_->end()) return it->second;
    }
    fail("unknown fuzzy datatype label: " + label);
    return {};
  }

  const std::string& peek() const { return tokens_[pos_]; }
  std::string next() { return tokens_[pos_++]; }
  std::string next_identifier(const char* what) {
    if (at_end()) fail(std::string("expected ") + what);
    std::string tok = next();
    if (tok == "(" || tok == ")" || tok == "=") fail(std::string("expected ") + what);
    return tok;
  }
  void expect(const std::string& tok) {
    if (at_end() || tokens_[pos_] != tok) fail("expected '" + tok + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_); }

  const std::vector<std::string>& tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  const KnowledgeBase* kb_;
  const std::map<std::string, DatatypePredicate>* labels_;
};

} // namespace detail

/// Parses a concept expression against a KB's declarations.
inline Concept parse_concept(const std::string& text, const KnowledgeBase& kb,
                             std::size_t line = 0) {
  const auto tokens = detail::tokenize(text);
  return detail::ConceptParser(tokens, line, &kb, nullptr).parse();
}

// ---------------------------------------------------------------------------
// Knowledge base text format

/// Parses the line-based KB format:
///   class A | objprop r | dataprop s real|int|bool [functional]
///   gci <body> <HeadAtom>      (head may also be `(p some X)`, kept inert)
///   instance <a> <concept>     | related <a> <r> <b> | value <a> <s> <literal>
/// Names must be declared before use. '#' starts a comment.
inline KnowledgeBase parse_kb(const std::string& text) {
  KnowledgeBase kb;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    const std::string& directive = tokens[0];
    auto need = [&](std::size_t n, const char* usage) {
      if (tokens.size() != n) throw ParseError(std::string("usage: ") + usage, lineno);
    };
    try {
      if (directive == "class") {
        need(2, "class <Name>");
        kb.declare_class(tokens[1]);
      } else if (directive == "objprop") {
        need(2, "objprop <name>");
        kb.declare_object_property(tokens[1]);
      } else if (directive == "dataprop") {
        if (tokens.size() != 3 && tokens.size() != 4)
          throw ParseError("usage: dataprop <name> real|int|bool [functional]", lineno);
        Literal::Type type;
        if (tokens[2] == "real") type = Literal::Type::Real;
        else if (tokens[2] == "int") type = Literal::Type::Int;
        else if (tokens[2] == "bool") type = Literal::Type::Bool;
        else throw ParseError("unknown data property type: " + tokens[2], lineno);
        bool functional = false;
        if (tokens.size() == 4) {
          if (tokens[3] != "functional")
            throw ParseError("unknown data property modifier: " + tokens[3], lineno);
          functional = true;
        }
        kb.declare_data_property(tokens[1], type, functional);
      } else if (directive == "gci") {
        std::vector<std::string> rest(tokens.begin() + 1, tokens.end());
        detail::ConceptParser parser(rest, lineno, &kb, nullptr);
        Concept body = parser.parse_expression();
        std::size_t pos = parser.position();
        if (pos >= rest.size()) throw ParseError("gci is missing its head", lineno);
        if (rest[pos] == "(") {
          // Existential head: (p some Filler).
          if (pos + 5 != rest.size() || rest[pos + 2] != "some" || rest[pos + 4] != ")")
            throw ParseError("gci head must be an atom or (property some Filler)", lineno);
          if (!body.is(ConceptKind::Atom))
            throw ParseError("existential-head axioms require an atomic body", lineno);
          kb.add_range_axiom(body.name, rest[pos + 1], rest[pos + 3]);
        } else {
          if (pos + 1 != rest.size())
            throw ParseError("unexpected tokens after the gci head", lineno);
          kb.add_gci(canonicalize(body), rest[pos]);
        }
      } else if (directive == "instance") {
        if (tokens.size() < 3) throw ParseError("usage: instance <a> <concept>", lineno);
        std::vector<std::string> rest(tokens.begin() + 2, tokens.end());
        Concept c = detail::ConceptParser(rest, lineno, &kb, nullptr).parse();
        kb.add_instance(tokens[1], canonicalize(c));
      } else if (directive == "related") {
        need(4, "related <a> <r> <b>");
        kb.add_related(tokens[1], tokens[2], tokens[3]);
      } else if (directive == "value") {
        need(4, "value <a> <s> <literal>");
        const auto type_it = kb.data_properties.find(tokens[2]);
        if (type_it == kb.data_properties.end())
          throw ParseError("undeclared data property: " + tokens[2], lineno);
        Literal lit;
        if (type_it->second == Literal::Type::Bool) {
          if (tokens[3] != "true" && tokens[3] != "false")
            throw ParseError("expected a boolean literal for " + tokens[2], lineno);
          lit = Literal::of_bool(tokens[3] == "true");
        } else {
          auto num = detail::try_parse_number(tokens[3]);
          if (!num) throw ParseError("expected a numeric literal for " + tokens[2], lineno);
          lit = type_it->second == Literal::Type::Int
                    ? Literal::integer(static_cast<long long>(*num))
                    : Literal::real(*num);
        }
        kb.add_value(tokens[1], tokens[2], lit);
      } else {
        throw ParseError("unknown directive: " + directive, lineno);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return kb;
}

inline std::string serialize_kb(const KnowledgeBase& kb) {
  std::string out;
  for (const auto& name : kb.concept_names) out += "class " + name + "\n";
  for (const auto& name : kb.object_properties) out += "objprop " + name + "\n";
  for (const auto& [name, type] : kb.data_properties) {
    out += "dataprop " + name + " ";
    out += type == Literal::Type::Real ? "real" : type == Literal::Type::Int ? "int" : "bool";
    if (kb.functional_data_properties.count(name)) out += " functional";
    out += "\n";
  }
  for (const auto& gci : kb.tbox) out += "gci " + to_string(gci.body) + " " + gci.head + "\n";
  for (const auto& ax : kb.range_axioms)
    out += "gci " + ax.body_atom + " (" + ax.property + " some " + ax.filler + ")\n";
  for (const auto& ca : kb.concept_assertions)
    out += "instance " + ca.individual + " " + to_string(ca.expr) + "\n";
  for (const auto& ra : kb.role_assertions)
    out += "related " + ra.subject + " " + ra.role + " " + ra.object + "\n";
  for (const auto& da : kb.data_assertions)
    out += "value " + da.individual + " " + da.property + " " + to_string(da.value) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Example files: `pos <individual>` / `neg <individual>`

inline TrainingSet parse_examples(const std::string& text) {
  TrainingSet e;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2 || (tokens[0] != "pos" && tokens[0] != "neg"))
      throw ParseError("expected `pos <individual>` or `neg <individual>`", lineno);
    if (tokens[0] == "pos")
      e.positives.insert(tokens[1]);
    else
      e.non_positives.insert(tokens[1]);
  }
  return e;
}

inline std::string serialize_examples(const TrainingSet& e) {
  std::string out;
  for (const auto& a : e.positives) out += "pos " + a + "\n";
  for (const auto& a : e.non_positives) out += "neg " + a + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Fuzzy datatype listings

inline const char* shape_name(DatatypePredicate::Shape s) {
  switch (s) {
    case DatatypePredicate::Shape::LeftShoulder: return "left-shoulder";
    case DatatypePredicate::Shape::RightShoulder: return "right-shoulder";
    case DatatypePredicate::Shape::Triangular: return "triangular";
    case DatatypePredicate::Shape::Trapezoidal: return "trapezoidal";
    default: return "equals";
  }
}

inline std::optional<DatatypePredicate::Shape> shape_from_name(const std::string& name) {
  if (name == "left-shoulder") return DatatypePredicate::Shape::LeftShoulder;
  if (name == "right-shoulder") return DatatypePredicate::Shape::RightShoulder;
  if (name == "triangular") return DatatypePredicate::Shape::Triangular;
  if (name == "trapezoidal") return DatatypePredicate::Shape::Trapezoidal;
  return std::nullopt;
}

/// One display line per predicate: `<label> <shape> <params...>`.
inline std::string serialize_datatypes(const std::vector<FuzzyDatatype>& datatypes) {
  std::string out;
  for (const auto& fd : datatypes) {
    out += fd.label;
    out += " ";
    out += shape_name(fd.predicate.shape);
    for (double p : fd.predicate.params) out += " " + detail::fixed(p, 2);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hypothesis files

/// Fuzzy datatypes referenced by the hypothesis bodies, one per label,
/// sorted by label.
inline std::vector<FuzzyDatatype> used_datatypes(const Hypothesis& h) {
  std::map<std::string, FuzzyDatatype> by_label;
  auto visit = [&](auto&& self, const Concept& c) -> void {
    if (c.is(ConceptKind::ExistsData) && c.predicate.is_fuzzy_shape())
      by_label.emplace(c.predicate.label, FuzzyDatatype{c.name, c.predicate, c.predicate.label});
    for (const auto& child : c.children) self(self, child);
  };
  for (const auto& wl : h.weak_learners)
    for (const auto& body : wl.bodies) visit(visit, body);
  for (const auto& rule : h.rules) visit(visit, rule.body);
  std::vector<FuzzyDatatype> out;
  for (auto& [label, fd] : by_label) out.push_back(std::move(fd));
  return out;
}

/// Serializes a hypothesis in the listing layout: rule blocks, the
/// aggregation (or rule-degree) lines, the fuzzy datatype block, and a
/// trailing full-precision machine block that makes parsing lossless.
inline std::string serialize_hypothesis(const Hypothesis& h, const std::string& method_label) {
  std::string out;
  const std::vector<FuzzyDatatype> datatypes = used_datatypes(h);
  if (h.kind == Hypothesis::Kind::Boost) {
    for (const auto& wl : h.weak_learners) {
      out += "# Weak Learner " + wl.name + "\n";
      for (const auto& body : wl.bodies)
        out += to_string(body) + " SubClassOf " + wl.name + "\n";
      out += "\n";
    }
    out += "# Real Adaboost aggregation\n";
    std::string agg;
    for (std::size_t i = 0; i < h.weak_learners.size(); ++i) {
      if (i) agg += " + ";
      agg += detail::fixed(h.alphas[i], 3) + " * " + h.weak_learners[i].name;
    }
    if (agg.empty()) agg = "0.000"; // empty ensemble predicts 0 everywhere
    out += agg + " SubClassOf " + h.target + "\n\n";
  } else {
    out += "# FOIL-DL rules\n";
    for (const auto& rule : h.rules)
      out += to_string(rule.body) + " SubClassOf " + h.target + " degree " +
             detail::fixed(rule.degree, 4) + "\n";
    out += "\n";
  }

  if (!datatypes.empty()) {
    out += "# Fuzzy datatypes (" + method_label + ")\n";
    out += serialize_datatypes(datatypes);
    out += "\n";
  }

  out += "# Machine-precision parameters\n";
  if (h.kind == Hypothesis::Kind::Boost) {
    for (std::size_t i = 0; i < h.alphas.size(); ++i)
      out += "machine alpha " + std::to_string(i + 1) + " " + detail::format_hex(h.alphas[i]) +
             "\n";
  } else {
    for (std::size_t i = 0; i < h.rules.size(); ++i)
      out += "machine degree " + std::to_string(i + 1) + " " +
             detail::format_hex(h.rules[i].degree) + "\n";
  }
  for (const auto& fd : datatypes) {
    out += "machine datatype " + fd.label;
    for (double p : fd.predicate.params) out += " " + detail::format_hex(p);
    out += "\n";
  }
  return out;
}

/// Parses a serialized hypothesis back. Rule bodies are reconstructed with
/// the machine-precision datatype parameters, so predictions round-trip
/// bit-for-bit.
inline Hypothesis parse_hypothesis(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  struct RawRule {
    std::vector<std::string> body_tokens;
    std::string head;
    std::optional<double> degree;
    std::size_t line;
  };
  std::vector<RawRule> raw_rules;
  std::vector<std::string> aggregation;
  std::size_t aggregation_line = 0;
  std::map<std::string, DatatypePredicate> labels;
  std::map<std::string, std::vector<double>> machine_params;
  std::map<std::size_t, double> machine_alphas, machine_degrees;

  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "machine") {
      if (tokens.size() >= 4 && (tokens[1] == "alpha" || tokens[1] == "degree")) {
        const auto idx = detail::try_parse_number(tokens[2]);
        const auto val = detail::try_parse_number(tokens[3]);
        if (!idx || !val) throw ParseError("malformed machine line", lineno);
        (tokens[1] == "alpha" ? machine_alphas
                              : machine_degrees)[static_cast<std::size_t>(*idx)] = *val;
      } else if (tokens.size() >= 4 && tokens[1] == "datatype") {
        std::vector<double> params;
        for (std::size_t i = 3; i < tokens.size(); ++i) {
          const auto val = detail::try_parse_number(tokens[i]);
          if (!val) throw ParseError("malformed machine datatype line", lineno);
          params.push_back(*val);
        }
        machine_params[tokens[2]] = std::move(params);
      } else {
        throw ParseError("malformed machine line", lineno);
      }
      continue;
    }

    auto sub = std::find(tokens.begin(), tokens.end(), "SubClassOf");
    if (sub != tokens.end()) {
      const bool is_aggregation =
          std::find(tokens.begin(), sub, "*") != sub ||
          (tokens.size() == 3 && sub == tokens.begin() + 1 &&
           detail::try_parse_number(tokens[0]) == 0.0); // empty ensemble
      if (is_aggregation) {
        aggregation = tokens;
        aggregation_line = lineno;
      } else {
        RawRule r;
        r.body_tokens.assign(tokens.begin(), sub);
        auto after = sub + 1;
        if (after == tokens.end()) throw ParseError("rule line is missing its head", lineno);
        r.head = *after++;
        if (after != tokens.end()) {
          if (*after != "degree" || after + 1 == tokens.end())
            throw ParseError("expected `degree <value>` after the rule head", lineno);
          const auto d = detail::try_parse_number(*(after + 1));
          if (!d) throw ParseError("malformed rule degree", lineno);
          r.degree = *d;
        }
        r.line = lineno;
        raw_rules.push_back(std::move(r));
      }
      continue;
    }

    // Datatype display line: <label> <shape> <params...>
    if (tokens.size() >= 4) {
      if (auto shape = shape_from_name(tokens[1])) {
        std::vector<double> params;
        for (std::size_t i = 2; i < tokens.size(); ++i) {
          const auto val = detail::try_parse_number(tokens[i]);
          if (!val) throw ParseError("malformed datatype parameter", lineno);
          params.push_back(*val);
        }
        DatatypePredicate pred;
        pred.shape = *shape;
        pred.params = std::move(params);
        pred.label = tokens[0];
        labels[tokens[0]] = std::move(pred);
        continue;
      }
    }
    throw ParseError("unrecognized line in hypothesis file", lineno);
  }

  // Machine parameters take precedence over the rounded display values.
  for (auto& [label, pred] : labels) {
    auto it = machine_params.find(label);
    if (it != machine_params.end() && it->second.size() == pred.params.size())
      pred.params = it->second;
    feb::detail::check_ordered(pred.params, "datatype");
  }

  Hypothesis h;
  auto parse_body = [&](const RawRule& r) {
    return canonicalize(
        detail::ConceptParser(r.body_tokens, r.line, nullptr, &labels).parse());
  };

  if (!aggregation.empty()) {
    h.kind = Hypothesis::Kind::Boost;
    // <alpha> * <WL> (+ ...) SubClassOf <target>; an empty ensemble is the
    // degenerate `0.000 SubClassOf <target>`.
    std::map<std::string, std::size_t> wl_index;
    std::size_t i = 0;
    if (aggregation.size() == 3 && aggregation[1] == "SubClassOf" &&
        detail::try_parse_number(aggregation[0]) == 0.0)
      i = 1;
    while (i < aggregation.size() && aggregation[i] != "SubClassOf") {
      const auto alpha = detail::try_parse_number(aggregation[i]);
      if (!alpha || i + 2 >= aggregation.size() || aggregation[i + 1] != "*")
        throw ParseError("malformed aggregation line", aggregation_line);
      const std::string wl_name = aggregation[i + 2];
      wl_index[wl_name] = h.weak_learners.size();
      h.weak_learners.push_back({wl_name, {}});
      h.alphas.push_back(machine_alphas.count(h.alphas.size() + 1)
                             ? machine_alphas[h.alphas.size() + 1]
                             : *alpha);
      i += 3;
      if (i < aggregation.size() && aggregation[i] == "+") ++i;
    }
    if (i + 1 >= aggregation.size())
      throw ParseError("aggregation line is missing its target", aggregation_line);
    h.target = aggregation[i + 1];
    for (const auto& r : raw_rules) {
      auto it = wl_index.find(r.head);
      if (it == wl_index.end())
        throw ParseError("rule head '" + r.head + "' does not match any weak learner", r.line);
      h.weak_learners[it->second].bodies.push_back(parse_body(r));
    }
  } else {
    h.kind = Hypothesis::Kind::Foil;
    std::size_t index = 0;
    for (const auto& r : raw_rules) {
      ++index;
      if (!r.degree) throw ParseError("rule line is missing its degree", r.line);
      if (h.target.empty()) h.target = r.head;
      if (h.target != r.head)
        throw ParseError("rule heads name different targets", r.line);
      const double degree = machine_degrees.count(index) ? machine_degrees[index] : *r.degree;
      h.rules.push_back({parse_body(r), degree});
    }
    if (raw_rules.empty()) throw ParseError("hypothesis file contains no rules", 1);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Tabular conversion (CSV -> KB)

struct TableColumn {
  std::string name;
  std::optional<Literal::Type> declared_type;
};

struct ConvertedTable {
  KnowledgeBase kb;
  std::vector<std::string> targets;                 // first-appearance order
  std::map<std::string, TrainingSet> example_seeds; // per target: that class vs the rest
  std::vector<std::string> row_individuals;
};

/// Builds a KB from tabular data: one individual per row asserted to its
/// target class, one functional data property per attribute with a range
/// axiom on the shared `class` concept, and one `T [= class` axiom per
/// target name.
inline ConvertedTable convert_table(const std::vector<std::vector<std::string>>& rows,
                                    const std::vector<TableColumn>& schema) {
  if (rows.empty()) throw InputError("empty dataset");
  const std::size_t n_attrs = schema.size();
  for (const auto& row : rows)
    if (row.size() != n_attrs + 1)
      throw InputError("row arity does not match the schema (expected " +
                       std::to_string(n_attrs + 1) + " cells)");

  // Column types: declared, or inferred from the values.
  std::vector<Literal::Type> types(n_attrs);
  for (std::size_t j = 0; j < n_attrs; ++j) {
    if (schema[j].declared_type) {
      types[j] = *schema[j].declared_type;
      continue;
    }
    bool all_bool = true, all_int = true, all_real = true;
    for (const auto& row : rows) {
      const std::string& cell = row[j];
      all_bool = all_bool && (cell == "true" || cell == "false");
      all_int = all_int && detail::is_integer_token(cell);
      all_real = all_real && detail::try_parse_number(cell).has_value();
    }
    if (all_bool) types[j] = Literal::Type::Bool;
    else if (all_int) types[j] = Literal::Type::Int;
    else if (all_real) types[j] = Literal::Type::Real;
    else throw InputError("column '" + schema[j].name + "' has inconsistent value types");
  }

  ConvertedTable out;
  KnowledgeBase& kb = out.kb;
  kb.declare_class("class");
  for (const auto& row : rows) {
    const std::string& target = row.back();
    if (target == "class") throw InputError("target class name 'class' is reserved");
    if (!kb.is_class(target)) {
      kb.declare_class(target);
      out.targets.push_back(target);
    }
  }
  for (std::size_t j = 0; j < n_attrs; ++j)
    kb.declare_data_property(schema[j].name, types[j], /*functional=*/true);
  for (const auto& target : out.targets) kb.add_gci(Concept::atom(target), "class");
  for (std::size_t j = 0; j < n_attrs; ++j) {
    const char* type_name = types[j] == Literal::Type::Real ? "real"
                            : types[j] == Literal::Type::Int ? "int" : "bool";
    kb.add_range_axiom("class", schema[j].name, type_name);
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string individual = "a" + std::to_string(r + 1);
    out.row_individuals.push_back(individual);
    kb.add_instance(individual, Concept::atom(rows[r].back()));
    for (std::size_t j = 0; j < n_attrs; ++j) {
      const std::string& cell = rows[r][j];
      Literal lit;
      if (types[j] == Literal::Type::Bool) {
        if (cell != "true" && cell != "false")
          throw InputError("column '" + schema[j].name + "' has inconsistent value types");
        lit = Literal::of_bool(cell == "true");
      } else {
        const auto num = detail::try_parse_number(cell);
        if (!num || (types[j] == Literal::Type::Int && !detail::is_integer_token(cell)))
          throw InputError("column '" + schema[j].name + "' has inconsistent value types");
        lit = types[j] == Literal::Type::Int ? Literal::integer(static_cast<long long>(*num))
                                             : Literal::real(*num);
      }
      kb.add_value(individual, schema[j].name, lit);
    }
  }

  for (const auto& target : out.targets) {
    TrainingSet& seeds = out.example_seeds[target];
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].back() == target)
        seeds.positives.insert(out.row_individuals[r]);
      else
        seeds.non_positives.insert(out.row_individuals[r]);
    }
  }
  return out;
}

/// CSV with a header row; column headers may carry `:real`/`:int`/`:bool`
/// type annotations. The last column holds the target class names.
inline ConvertedTable convert_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    cells.push_back(cur);
    for (auto& c : cells) {
      while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.erase(c.begin());
      while (!c.empty() && (c.back() == ' ' || c.back() == '\t')) c.pop_back();
    }
    return cells;
  };

  if (!std::getline(in, line)) throw InputError("empty dataset");
  const std::vector<std::string> header = split(line);
  if (header.size() < 2) throw InputError("dataset needs at least one attribute and a target");
  std::vector<TableColumn> schema;
  for (std::size_t j = 0; j + 1 < header.size(); ++j) {
    TableColumn col;
    const auto colon = header[j].find(':');
    col.name = header[j].substr(0, colon);
    if (colon != std::string::npos) {
      const std::string type = header[j].substr(colon + 1);
      if (type == "real") col.declared_type = Literal::Type::Real;
      else if (type == "int") col.declared_type = Literal::Type::Int;
      else if (type == "bool") col.declared_type = Literal::Type::Bool;
      else throw InputError("unknown column type annotation: " + type);
    }
    if (col.name.empty()) throw InputError("empty column name in the header");
    schema.push_back(std::move(col));
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split(line));
  }
  return convert_table(rows, schema);
}

// ---------------------------------------------------------------------------
// Evaluation reports

/// Human-readable table mirroring the per-configuration result layout.
inline std::string serialize_report_table(const EvalReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "target %s, algorithm %s, %d fold(s), seed %lu\n",
                report.target.c_str(), to_string(report.algorithm), report.fold_count,
                report.seed);
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-8s %-6s %-3s %8s %8s %8s %8s %8s %8s %8s %8s\n", "method",
                "theta", "fs", "P_f", "R_f", "F1_f", "P", "R", "F1", "MSE", "fF1F1");
  out += buf;
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const CellResult& c = report.cells[i];
    const MetricsRecord& m = c.aggregate;
    std::snprintf(buf, sizeof(buf),
                  "%-8s %-6s %-3d %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f%s\n",
                  to_string(c.method), detail::fixed(c.theta, 2).c_str(), c.partitions,
                  m.precision_f, m.recall_f, m.f1_f, m.precision, m.recall, m.f1, m.mse, m.ff1f1,
                  i == report.winner ? "  <- selected" : "");
    out += buf;
  }
  return out;
}

namespace detail {
inline std::string record_fields(const MetricsRecord& m) {
  auto num = [](double v) { return feb::detail::format_number(v); };
  std::string s;
  s += " tp_f=" + num(m.tp_f) + " fp_f=" + num(m.fp_f) + " tnp_f=" + num(m.tnp_f) +
       " fnp_f=" + num(m.fnp_f);
  s += " p_f=" + num(m.precision_f) + " r_f=" + num(m.recall_f) + " f1_f=" + num(m.f1_f);
  s += " tp=" + num(m.tp) + " fp=" + num(m.fp) + " tnp=" + num(m.tnp) + " fnp=" + num(m.fnp);
  s += " p=" + num(m.precision) + " r=" + num(m.recall) + " f1=" + num(m.f1);
  s += " mse=" + num(m.mse) + " ff1f1=" + num(m.ff1f1);
  s += std::string(" p_undef=") + (m.precision_undefined || m.precision_f_undefined ? "1" : "0");
  s += std::string(" r_undef=") + (m.recall_undefined || m.recall_f_undefined ? "1" : "0");
  return s;
}
} // namespace detail

/// Flat machine-readable records: one line per (configuration, fold), one
/// aggregate line per configuration, and a final winner line.
inline std::string serialize_report_machine(const EvalReport& report) {
  std::string out = "report target=" + report.target +
                    " algorithm=" + to_string(report.algorithm) +
                    " folds=" + std::to_string(report.fold_count) +
                    " seed=" + std::to_string(report.seed) +
                    " cells=" + std::to_string(report.cells.size()) + "\n";
  auto cell_key = [](const CellResult& c) {
    return std::string("method=") + to_string(c.method) +
           " theta=" + feb::detail::format_number(c.theta) +
           " partitions=" + std::to_string(c.partitions);
  };
  for (const auto& c : report.cells) {
    for (std::size_t f = 0; f < c.fold_metrics.size(); ++f) {
      out += "record " + cell_key(c) + " fold=" + std::to_string(f) +
             detail::record_fields(c.fold_metrics[f]) +
             " failed=" + (c.fold_failures[f].empty() ? "0" : "1") + "\n";
    }
    out += "aggregate " + cell_key(c) + detail::record_fields(c.aggregate) + "\n";
  }
  out += "winner " + cell_key(report.winning_cell()) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << content;
}

}  // namespace io

}  // namespace feb
