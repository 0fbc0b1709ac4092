#include "hemd/baselines.hpp"

#include <array>

#include "hemd/fraction.hpp"

namespace hemd {

std::vector<Region> threshold_components(const ProbMap& p, double th,
                                         Connectivity conn) {
    return components_at(p, th, conn);
}

double otsu_threshold(const ProbMap& p) {
    std::array<std::int64_t, ProbMap::kLevels> histogram{};
    for (std::uint8_t level : p.levels()) ++histogram[level];

    int distinct = 0;
    for (std::int64_t count : histogram) distinct += count > 0;
    if (distinct < 2) {
        throw DegenerateError("all probability values are equal");
    }

    // Minimizing within-class variance == maximizing
    // S0^2/N0 + S1^2/N1 over splits (foreground = level >= s), with the
    // total sum of squares fixed. Kept exact so ties break cleanly.
    auto class_term = [](const BigInt& sum, std::int64_t count) {
        if (count == 0) return Fraction(0);
        return Fraction(sum * sum, count);
    };

    BigInt total_sum = 0;
    std::int64_t total_count = 0;
    for (int level = 0; level < ProbMap::kLevels; ++level) {
        total_sum += BigInt(level) * histogram[static_cast<std::size_t>(level)];
        total_count += histogram[static_cast<std::size_t>(level)];
    }

    int best_split = 1;
    Fraction best_value(-1);
    BigInt below_sum = 0;
    std::int64_t below_count = 0;
    for (int split = 1; split <= 100; ++split) {
        below_sum += BigInt(split - 1) * histogram[static_cast<std::size_t>(split - 1)];
        below_count += histogram[static_cast<std::size_t>(split - 1)];
        const Fraction value = class_term(below_sum, below_count) +
                               class_term(total_sum - below_sum,
                                          total_count - below_count);
        if (value > best_value) {
            best_value = value;
            best_split = split;
        }
    }
    return best_split / 100.0;
}

std::vector<Region> max_value_components(const ProbMap& fg,
                                         const ProbMap& boundary,
                                         const ProbMap& bg,
                                         Connectivity conn) {
    if (!boundary.grid().same_shape(fg.height(), fg.width()) ||
        !bg.grid().same_shape(fg.height(), fg.width())) {
        throw ShapeError("class probability maps must share one shape");
    }
    Grid2D<std::uint8_t> mask(fg.height(), fg.width(), std::uint8_t{0});
    for (std::size_t i = 0; i < fg.pixel_count(); ++i) {
        const int f = fg.levels()[i];
        const int b = boundary.levels()[i];
        const int g = bg.levels()[i];
        const int sum = f + b + g;
        if (sum < 99 || sum > 101) {
            throw RangeError("class probabilities must sum to ~1 at pixel " +
                             std::to_string(i));
        }
        if (f > b && f > g) mask.values[i] = 100;
    }
    return components_at_level(ProbMap(std::move(mask)), 100, conn);
}

}  // namespace hemd
