#pragma once

// Umbrella header for the fuzzy EL rule-induction library.

#include "feb/concept.hpp"
#include "feb/closure.hpp"
#include "feb/error.hpp"
#include "feb/eval.hpp"
#include "feb/fuzzify.hpp"
#include "feb/fuzzy.hpp"
#include "feb/io.hpp"
#include "feb/kb.hpp"
#include "feb/learn.hpp"
#include "feb/refine.hpp"
#include "feb/semantics.hpp"
