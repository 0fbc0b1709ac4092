#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hemd/error.hpp"
#include "hemd/fraction.hpp"

namespace hemd {

// Dense row-major 2D grid. Pixel (row, col) lives at linear index
// row * width + col; all region and component code works on linear indices.
template <typename T>
struct Grid2D {
    int height = 0;
    int width = 0;
    std::vector<T> values;

    Grid2D() = default;

    Grid2D(int h, int w, T fill = T{})
        : height(h), width(w), values(check_dims(h, w), fill) {}

    Grid2D(int h, int w, std::vector<T> v)
        : height(h), width(w), values(std::move(v)) {
        if (values.size() != check_dims(h, w)) {
            throw ShapeError("grid value count does not match height*width");
        }
    }

    std::size_t size() const { return values.size(); }

    T operator()(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    T& operator()(int row, int col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }

    bool same_shape(int h, int w) const { return height == h && width == w; }

    bool operator==(const Grid2D&) const = default;

private:
    static std::size_t check_dims(int h, int w) {
        if (h < 1 || w < 1) throw ShapeError("grid dimensions must be >= 1x1");
        return static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
    }
};

// A non-empty set of pixels stored as strictly increasing linear indices.
// Immutable after construction; intersection/union are linear merges.
class Region {
public:
    // Requires sorted, strictly increasing, non-empty, non-negative indices.
    explicit Region(std::vector<std::int32_t> pixels);

    // Sorts (and validates) arbitrary order input.
    static Region from_unsorted(std::vector<std::int32_t> pixels);

    std::span<const std::int32_t> pixels() const { return pixels_; }
    int size() const { return static_cast<int>(pixels_.size()); }
    std::int32_t min_pixel() const { return pixels_.front(); }
    std::int32_t max_pixel() const { return pixels_.back(); }
    bool contains(std::int32_t pixel) const;

    bool operator==(const Region&) const = default;

private:
    std::vector<std::int32_t> pixels_;
};

int region_size(const Region& r);

// Number of pixels in the intersection (two-pointer merge).
int intersection_size(const Region& a, const Region& b);

// Exact intersection-over-union; 0 when disjoint, 1 iff equal.
Fraction iou(const Region& a, const Region& b);

bool regions_disjoint(const Region& a, const Region& b);

// True iff inner is a subset of outer.
bool region_contains(const Region& outer, const Region& inner);

// Integer label grid; 0 is background, instances are labeled 1..K.
struct LabelMap {
    Grid2D<std::uint32_t> grid;

    bool operator==(const LabelMap&) const = default;
};

// Renders pairwise disjoint regions to a label map, label k = regions[k-1].
// Throws OverlapError if two regions share a pixel, ShapeError if a pixel
// index falls outside the grid.
LabelMap label_map_from_regions(std::span<const Region> regions, int height,
                                int width);

// Extracts each label's pixel set, ordered by ascending label value.
// Labels need not be contiguous; 0 is skipped.
std::vector<Region> regions_from_label_grid(const Grid2D<std::uint32_t>& grid);

}  // namespace hemd
