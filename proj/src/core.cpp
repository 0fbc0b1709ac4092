#include "hemd/core.hpp"

#include <algorithm>

namespace hemd {

Region::Region(std::vector<std::int32_t> pixels) : pixels_(std::move(pixels)) {
    if (pixels_.empty()) throw Error("region must be non-empty");
    if (pixels_.front() < 0) throw Error("region indices must be non-negative");
    for (std::size_t i = 1; i < pixels_.size(); ++i) {
        if (pixels_[i] <= pixels_[i - 1]) {
            throw Error("region indices must be strictly increasing");
        }
    }
}

Region Region::from_unsorted(std::vector<std::int32_t> pixels) {
    std::sort(pixels.begin(), pixels.end());
    return Region(std::move(pixels));
}

bool Region::contains(std::int32_t pixel) const {
    return std::binary_search(pixels_.begin(), pixels_.end(), pixel);
}

int region_size(const Region& r) { return r.size(); }

int intersection_size(const Region& a, const Region& b) {
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    std::size_t i = 0, j = 0;
    int count = 0;
    while (i < pa.size() && j < pb.size()) {
        if (pa[i] < pb[j]) {
            ++i;
        } else if (pb[j] < pa[i]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

Fraction iou(const Region& a, const Region& b) {
    const int inter = intersection_size(a, b);
    if (inter == 0) return Fraction(0);
    const int uni = a.size() + b.size() - inter;
    return Fraction(inter, uni);
}

bool regions_disjoint(const Region& a, const Region& b) {
    if (a.max_pixel() < b.min_pixel() || b.max_pixel() < a.min_pixel()) {
        return true;
    }
    return intersection_size(a, b) == 0;
}

bool region_contains(const Region& outer, const Region& inner) {
    return intersection_size(outer, inner) == inner.size();
}

LabelMap label_map_from_regions(std::span<const Region> regions, int height,
                                int width) {
    Grid2D<std::uint32_t> grid(height, width, 0u);
    const auto total = static_cast<std::int64_t>(grid.size());
    for (std::size_t k = 0; k < regions.size(); ++k) {
        const auto label = static_cast<std::uint32_t>(k + 1);
        for (std::int32_t pixel : regions[k].pixels()) {
            if (pixel < 0 || pixel >= total) {
                throw ShapeError("region pixel outside grid bounds");
            }
            auto& cell = grid.values[static_cast<std::size_t>(pixel)];
            if (cell != 0) {
                throw OverlapError("pixel " + std::to_string(pixel) +
                                   " assigned to two regions");
            }
            cell = label;
        }
    }
    return LabelMap{std::move(grid)};
}

std::vector<Region> regions_from_label_grid(
    const Grid2D<std::uint32_t>& grid) {
    std::uint32_t max_label = 0;
    for (std::uint32_t v : grid.values) max_label = std::max(max_label, v);
    std::vector<std::vector<std::int32_t>> buckets(max_label + 1);
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const std::uint32_t v = grid.values[i];
        if (v != 0) buckets[v].push_back(static_cast<std::int32_t>(i));
    }
    std::vector<Region> regions;
    for (std::uint32_t label = 1; label <= max_label; ++label) {
        if (!buckets[label].empty()) {
            regions.push_back(Region(std::move(buckets[label])));
        }
    }
    return regions;
}

}  // namespace hemd
