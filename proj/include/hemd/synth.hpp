#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hemd/core.hpp"
#include "hemd/probmap.hpp"

namespace hemd {

// A cell splitting into two daughters placed at center +- offset from
// `frame` on. The offset grows by `offset_growth` per subsequent frame so
// daughters can drift apart.
struct SplitEvent {
    int frame = 0;
    std::array<double, 2> offset{0.0, 0.0};  // (dy, dx)
    double offset_growth = 0.0;
    double daughter_radius = 0.0;  // 0 -> radius / sqrt(2)
};

// A scripted cell: a conical probability profile peak*max(0, 1 - d/radius)
// following per-frame centers.
struct CellTrack {
    double peak = 0.9;
    double radius = 4.0;
    int start_frame = 0;
    std::vector<std::array<double, 2>> centers;  // (y, x), one per live frame
    std::optional<SplitEvent> split;
};

struct Scenario {
    int height = 0;
    int width = 0;
    int frames = 0;
    double background = 0.0;
    double noise_amplitude = 0.0;
    std::uint64_t noise_seed = 0;
    std::vector<CellTrack> cells;
};

Scenario scenario_from_json(const nlohmann::json& doc);  // ConfigError
nlohmann::json scenario_to_json(const Scenario& scenario);

struct RenderResult {
    Sequence sequence;
    // Per frame, one region per live cell unit (a split cell contributes
    // two), in cell order. A unit's region is where its own profile is
    // >= 0.5, contested pixels going to the lower cell index.
    std::vector<std::vector<Region>> ground_truth;
};

// Deterministic: the same scenario renders bit-identical output.
RenderResult render(const Scenario& scenario);  // ConfigError

}  // namespace hemd
