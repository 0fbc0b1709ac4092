#pragma once

#include <vector>

#include "hemd/forest.hpp"
#include "hemd/probmap.hpp"

namespace hemd {

// Fixed-threshold baseline: connected components of {p >= th}.
std::vector<Region> threshold_components(const ProbMap& p, double th,
                                         Connectivity conn = Connectivity::eight);

// Threshold over the 101-bin quantized histogram minimizing the
// within-class variance, ties resolved to the lower threshold. Returns the
// probability t such that {p >= t} is foreground. Throws DegenerateError
// when all values are equal.
double otsu_threshold(const ProbMap& p);

// Three-class arbitration: a pixel is foreground iff the foreground
// probability is strictly greatest (ties go to background). Requires equal
// shapes (ShapeError) and per-pixel class sums within [0.99, 1.01]
// (RangeError).
std::vector<Region> max_value_components(const ProbMap& fg,
                                         const ProbMap& boundary,
                                         const ProbMap& bg,
                                         Connectivity conn = Connectivity::eight);

}  // namespace hemd
