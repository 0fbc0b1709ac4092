#include "hemd/probmap.hpp"

#include <cmath>

namespace hemd {

namespace {

void check_levels(const Grid2D<std::uint8_t>& grid) {
    for (std::uint8_t v : grid.values) {
        if (v > 100) {
            throw RangeError("probability level exceeds 100: " +
                             std::to_string(int(v)));
        }
    }
}

}  // namespace

ProbMap::ProbMap(Grid2D<std::uint8_t> levels) : grid_(std::move(levels)) {
    check_levels(grid_);
}

ProbMap::ProbMap(int height, int width, std::vector<std::uint8_t> levels)
    : grid_(height, width, std::move(levels)) {
    check_levels(grid_);
}

ProbMap quantize(const Grid2D<double>& raw) {
    Grid2D<std::uint8_t> out(raw.height, raw.width, std::uint8_t{0});
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        double v = raw.values[i];
        if (v < -1e-9 || v > 1.0 + 1e-9) {
            throw RangeError("probability value out of [0,1]: " +
                             std::to_string(v));
        }
        v = std::min(1.0, std::max(0.0, v));
        // Half-up on the scaled value: 0.005 -> 0.01.
        out.values[i] = static_cast<std::uint8_t>(std::floor(v * 100.0 + 0.5));
    }
    return ProbMap(std::move(out));
}

int prob_to_level(const Fraction& p) {
    if (p <= 0) return 0;
    if (p >= 1) return 100;
    // ceil(100 * p) computed exactly.
    const BigInt num = numerator(p) * 100;
    const BigInt den = denominator(p);
    BigInt level = num / den;
    if (level * den < num) ++level;
    return level.convert_to<int>();
}

int prob_to_level(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return 100;
    return static_cast<int>(std::ceil(p * 100.0 - 1e-9));
}

Sequence::Sequence(std::vector<ProbMap> frames) : frames_(std::move(frames)) {
    if (frames_.empty()) throw EmptyError("sequence must contain >= 1 frame");
    const int h = frames_.front().height();
    const int w = frames_.front().width();
    for (const ProbMap& f : frames_) {
        if (f.height() != h || f.width() != w) {
            throw ShapeError("sequence frames must share one frame size");
        }
    }
}

}  // namespace hemd
