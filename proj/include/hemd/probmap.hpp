#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hemd/core.hpp"
#include "hemd/fraction.hpp"

namespace hemd {

// A probability map quantized to 2 decimal places. Values are stored as
// integer hundredths (0..100) so thresholds and histograms are exact.
class ProbMap {
public:
    static constexpr int kLevels = 101;  // 0.00 .. 1.00

    explicit ProbMap(Grid2D<std::uint8_t> levels);
    ProbMap(int height, int width, std::vector<std::uint8_t> levels);

    int height() const { return grid_.height; }
    int width() const { return grid_.width; }
    std::size_t pixel_count() const { return grid_.size(); }

    std::uint8_t level(std::int32_t idx) const {
        return grid_.values[static_cast<std::size_t>(idx)];
    }
    double value(std::int32_t idx) const { return level(idx) / 100.0; }

    std::span<const std::uint8_t> levels() const { return grid_.values; }
    const Grid2D<std::uint8_t>& grid() const { return grid_; }

    bool operator==(const ProbMap&) const = default;

private:
    Grid2D<std::uint8_t> grid_;
};

// Rounds every value half-up to 2 decimals. Values within 1e-9 of [0,1]
// are clamped; anything further out raises RangeError.
ProbMap quantize(const Grid2D<double>& raw);

// Smallest quantization level l with l/100 >= p, clamped to [0, 100].
int prob_to_level(const Fraction& p);
int prob_to_level(double p);

// An ordered sequence of equally sized probability maps (a 2D+time video
// or the slices of a 3D stack).
class Sequence {
public:
    explicit Sequence(std::vector<ProbMap> frames);

    const std::vector<ProbMap>& frames() const { return frames_; }
    const ProbMap& frame(int w) const { return frames_[static_cast<std::size_t>(w)]; }
    int frame_count() const { return static_cast<int>(frames_.size()); }
    int height() const { return frames_.front().height(); }
    int width() const { return frames_.front().width(); }

private:
    std::vector<ProbMap> frames_;
};

}  // namespace hemd
