#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hemd/core.hpp"
#include "hemd/fraction.hpp"

namespace hemd {

// (gt index, pred index) pairs with IoU >= 0.5. Both families must be
// internally pairwise disjoint (OverlapError otherwise); disjointness
// makes matches one-to-one, which is asserted.
std::vector<std::pair<int, int>> match_pairs(std::span<const Region> gt,
                                             std::span<const Region> pred);

// Detection F1 under IoU >= 0.5 matching. Both families empty -> 1,
// exactly one empty -> 0.
Fraction f1_score(std::span<const Region> gt, std::span<const Region> pred);

// Aggregated Jaccard index: aggregated intersection over aggregated union
// with every never-used prediction penalizing the denominator. Argmax ties
// break to the lowest prediction index; a prediction may serve as argmax
// for several ground-truth instances.
Fraction aji_score(std::span<const Region> gt, std::span<const Region> pred);

}  // namespace hemd
