#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "feb/error.hpp"

namespace feb {

/// A typed data value: real, integer or boolean.
struct Literal {
  enum class Type { Real, Int, Bool };

  Type type = Type::Real;
  double number = 0.0;  // Real/Int payload
  bool boolean = false; // Bool payload

  static Literal real(double v) { return {Type::Real, v, false}; }
  static Literal integer(long long v) { return {Type::Int, static_cast<double>(v), false}; }
  static Literal of_bool(bool v) { return {Type::Bool, 0.0, v}; }

  bool is_numeric() const { return type != Type::Bool; }

  friend bool operator==(const Literal& a, const Literal& b) {
    if (a.is_numeric() != b.is_numeric()) return false;
    return a.is_numeric() ? a.number == b.number : a.boolean == b.boolean;
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.is_numeric() != b.is_numeric()) return b.is_numeric();
    return a.is_numeric() ? a.number < b.number : a.boolean < b.boolean;
  }
};

/// Unary fuzzy datatype predicate: one of the piecewise-linear shapes over
/// numeric values, or a crisp equality test (the singleton set {v}).
struct DatatypePredicate {
  enum class Shape { LeftShoulder, RightShoulder, Triangular, Trapezoidal, Equals };

  Shape shape = Shape::Equals;
  std::vector<double> params; // a<=b (<=c (<=d)) for the four fuzzy shapes
  Literal value;              // Equals only
  std::string label;          // display name, e.g. "Price_Fair"; empty for Equals

  static DatatypePredicate left_shoulder(double a, double b, std::string label = {});
  static DatatypePredicate right_shoulder(double a, double b, std::string label = {});
  static DatatypePredicate triangular(double a, double b, double c, std::string label = {});
  static DatatypePredicate trapezoidal(double a, double b, double c, double d,
                                       std::string label = {});
  static DatatypePredicate equals(Literal v) {
    DatatypePredicate d;
    d.shape = Shape::Equals;
    d.value = v;
    return d;
  }

  bool is_fuzzy_shape() const { return shape != Shape::Equals; }

  friend bool operator==(const DatatypePredicate& a, const DatatypePredicate& b) {
    return a.shape == b.shape && a.params == b.params &&
           (a.shape != Shape::Equals || a.value == b.value);
  }
  friend bool operator<(const DatatypePredicate& a, const DatatypePredicate& b) {
    if (a.shape != b.shape) return a.shape < b.shape;
    if (a.params != b.params) return a.params < b.params;
    if (a.shape == Shape::Equals && !(a.value == b.value)) return a.value < b.value;
    return false;
  }
};

namespace detail {
inline void check_ordered(const std::vector<double>& p, const char* shape) {
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i - 1] > p[i])
      throw InputError(std::string(shape) + ": parameters must be non-decreasing");
}
} // namespace detail

inline DatatypePredicate DatatypePredicate::left_shoulder(double a, double b, std::string label) {
  DatatypePredicate d;
  d.shape = Shape::LeftShoulder;
  d.params = {a, b};
  d.label = std::move(label);
  detail::check_ordered(d.params, "left-shoulder");
  return d;
}

inline DatatypePredicate DatatypePredicate::right_shoulder(double a, double b, std::string label) {
  DatatypePredicate d;
  d.shape = Shape::RightShoulder;
  d.params = {a, b};
  d.label = std::move(label);
  detail::check_ordered(d.params, "right-shoulder");
  return d;
}

inline DatatypePredicate DatatypePredicate::triangular(double a, double b, double c,
                                                       std::string label) {
  DatatypePredicate d;
  d.shape = Shape::Triangular;
  d.params = {a, b, c};
  d.label = std::move(label);
  detail::check_ordered(d.params, "triangular");
  return d;
}

inline DatatypePredicate DatatypePredicate::trapezoidal(double a, double b, double c, double d_,
                                                        std::string label) {
  DatatypePredicate d;
  d.shape = Shape::Trapezoidal;
  d.params = {a, b, c, d_};
  d.label = std::move(label);
  detail::check_ordered(d.params, "trapezoidal");
  return d;
}

/// Membership degree of value `v` under predicate `d`, always in [0,1].
/// Numeric shapes require a numeric value; Equals requires a matching
/// literal class (numeric vs boolean).
inline double eval_membership(const DatatypePredicate& d, const Literal& v) {
  if (d.shape == DatatypePredicate::Shape::Equals) {
    if (d.value.is_numeric() != v.is_numeric())
      throw InputError("equality predicate applied to a value of mismatched type");
    return d.value == v ? 1.0 : 0.0;
  }
  if (!v.is_numeric())
    throw InputError("fuzzy membership function applied to a non-numeric value");
  const double x = v.number;
  const auto& p = d.params;
  switch (d.shape) {
    case DatatypePredicate::Shape::LeftShoulder:
      if (x <= p[0]) return 1.0;
      if (x >= p[1]) return 0.0;
      return (p[1] - x) / (p[1] - p[0]);
    case DatatypePredicate::Shape::RightShoulder:
      if (x <= p[0]) return 0.0;
      if (x >= p[1]) return 1.0;
      return (x - p[0]) / (p[1] - p[0]);
    case DatatypePredicate::Shape::Triangular:
      if (x <= p[0] || x >= p[2]) return x == p[1] ? 1.0 : 0.0; // degenerate spike
      if (x <= p[1]) return (x - p[0]) / (p[1] - p[0]);
      return (p[2] - x) / (p[2] - p[1]);
    case DatatypePredicate::Shape::Trapezoidal:
      if (x <= p[0] || x >= p[3]) return x >= p[1] && x <= p[2] ? 1.0 : 0.0;
      if (x < p[1]) return (x - p[0]) / (p[1] - p[0]);
      if (x <= p[2]) return 1.0;
      return (p[3] - x) / (p[3] - p[2]);
    default:
      return 0.0;
  }
}

inline double eval_membership(const DatatypePredicate& d, double v) {
  return eval_membership(d, Literal::real(v));
}

}  // namespace feb
