#include "hemd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hemd {

namespace {

void validate(const Scenario& s) {
    if (s.height < 1 || s.width < 1) throw ConfigError("frame size must be >= 1x1");
    if (s.frames < 1) throw ConfigError("scenario needs >= 1 frame");
    if (s.background < 0.0 || s.background >= 0.5) {
        throw ConfigError("background level must lie in [0, 0.5)");
    }
    if (s.noise_amplitude < 0.0 || s.noise_amplitude > 0.05) {
        throw ConfigError("noise amplitude must lie in [0, 0.05]");
    }
    for (std::size_t c = 0; c < s.cells.size(); ++c) {
        const CellTrack& cell = s.cells[c];
        const std::string tag = "cell " + std::to_string(c) + ": ";
        if (!(cell.peak > 0.5 && cell.peak <= 1.0)) {
            throw ConfigError(tag + "peak must lie in (0.5, 1.0]");
        }
        if (cell.radius < 1.0) throw ConfigError(tag + "radius must be >= 1");
        if (cell.start_frame < 0 || cell.start_frame >= s.frames) {
            throw ConfigError(tag + "start_frame out of range");
        }
        if (cell.centers.empty()) throw ConfigError(tag + "needs >= 1 center");
        if (cell.start_frame + static_cast<int>(cell.centers.size()) > s.frames) {
            throw ConfigError(tag + "track extends past the last frame");
        }
        if (cell.split) {
            if (cell.split->frame < cell.start_frame ||
                cell.split->frame >= s.frames) {
                throw ConfigError(tag + "split frame out of range");
            }
            if (cell.split->daughter_radius != 0.0 &&
                cell.split->daughter_radius < 1.0) {
                throw ConfigError(tag + "daughter radius must be >= 1");
            }
        }
    }
}

// One renderable profile: either a whole cell or one daughter.
struct Unit {
    std::array<double, 2> center;
    double radius;
    double peak;
};

std::vector<Unit> units_at_frame(const Scenario& s, int frame) {
    std::vector<Unit> units;
    for (const CellTrack& cell : s.cells) {
        const int local = frame - cell.start_frame;
        if (local < 0 || local >= static_cast<int>(cell.centers.size())) {
            continue;
        }
        const std::array<double, 2>& center =
            cell.centers[static_cast<std::size_t>(local)];
        if (cell.split && frame >= cell.split->frame) {
            const SplitEvent& split = *cell.split;
            const double scale =
                1.0 + split.offset_growth * (frame - split.frame);
            const double radius = split.daughter_radius > 0.0
                                      ? split.daughter_radius
                                      : cell.radius / std::sqrt(2.0);
            for (double sign : {-1.0, 1.0}) {
                units.push_back(Unit{{center[0] + sign * split.offset[0] * scale,
                                      center[1] + sign * split.offset[1] * scale},
                                     radius,
                                     cell.peak});
            }
        } else {
            units.push_back(Unit{center, cell.radius, cell.peak});
        }
    }
    return units;
}

double profile_at(const Unit& unit, int row, int col) {
    const double dist = std::hypot(row - unit.center[0], col - unit.center[1]);
    return unit.peak * std::max(0.0, 1.0 - dist / unit.radius);
}

// Portable uniform in [-1, 1] built from raw engine output.
double signed_unit(std::mt19937_64& rng) {
    const auto bits = static_cast<double>(rng() >> 11);  // 53 bits
    return bits / 4503599627370495.0 * 2.0 - 1.0;
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& doc) {
    try {
        Scenario s;
        s.height = doc.at("height").get<int>();
        s.width = doc.at("width").get<int>();
        s.frames = doc.at("frames").get<int>();
        s.background = doc.value("background", 0.0);
        s.noise_amplitude = doc.value("noise_amplitude", 0.0);
        s.noise_seed = doc.value("noise_seed", std::uint64_t{0});
        for (const auto& cell_doc : doc.at("cells")) {
            CellTrack cell;
            cell.peak = cell_doc.at("peak").get<double>();
            cell.radius = cell_doc.at("radius").get<double>();
            cell.start_frame = cell_doc.value("start_frame", 0);
            for (const auto& center : cell_doc.at("centers")) {
                cell.centers.push_back(
                    {center.at(0).get<double>(), center.at(1).get<double>()});
            }
            if (cell_doc.contains("split")) {
                const auto& split_doc = cell_doc.at("split");
                SplitEvent split;
                split.frame = split_doc.at("frame").get<int>();
                split.offset = {split_doc.at("offset").at(0).get<double>(),
                                split_doc.at("offset").at(1).get<double>()};
                split.offset_growth = split_doc.value("offset_growth", 0.0);
                split.daughter_radius = split_doc.value("daughter_radius", 0.0);
                cell.split = split;
            }
            s.cells.push_back(std::move(cell));
        }
        validate(s);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad scenario JSON: ") + e.what());
    }
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
    nlohmann::json cells = nlohmann::json::array();
    for (const CellTrack& cell : scenario.cells) {
        nlohmann::json cell_doc = {{"peak", cell.peak},
                                   {"radius", cell.radius},
                                   {"start_frame", cell.start_frame},
                                   {"centers", cell.centers}};
        if (cell.split) {
            cell_doc["split"] = {{"frame", cell.split->frame},
                                 {"offset", cell.split->offset},
                                 {"offset_growth", cell.split->offset_growth},
                                 {"daughter_radius", cell.split->daughter_radius}};
        }
        cells.push_back(std::move(cell_doc));
    }
    return {{"height", scenario.height},
            {"width", scenario.width},
            {"frames", scenario.frames},
            {"background", scenario.background},
            {"noise_amplitude", scenario.noise_amplitude},
            {"noise_seed", scenario.noise_seed},
            {"cells", cells}};
}

RenderResult render(const Scenario& scenario) {
    validate(scenario);
    std::vector<ProbMap> frames;
    std::vector<std::vector<Region>> ground_truth;
    frames.reserve(static_cast<std::size_t>(scenario.frames));
    for (int frame = 0; frame < scenario.frames; ++frame) {
        const std::vector<Unit> units = units_at_frame(scenario, frame);
        Grid2D<double> raw(scenario.height, scenario.width,
                           scenario.background);
        std::vector<std::vector<std::int32_t>> gt_pixels(units.size());
        for (int row = 0; row < scenario.height; ++row) {
            for (int col = 0; col < scenario.width; ++col) {
                const std::int32_t idx = row * scenario.width + col;
                int owner = -1;
                for (std::size_t u = 0; u < units.size(); ++u) {
                    const double value = profile_at(units[u], row, col);
                    raw(row, col) = std::max(raw(row, col), value);
                    if (owner < 0 && value >= 0.5) {
                        owner = static_cast<int>(u);
                    }
                }
                if (owner >= 0) {
                    gt_pixels[static_cast<std::size_t>(owner)].push_back(idx);
                }
            }
        }
        if (scenario.noise_amplitude > 0.0) {
            std::mt19937_64 rng(scenario.noise_seed +
                                0x9e3779b97f4a7c15ULL * (frame + 1));
            for (double& value : raw.values) {
                value += scenario.noise_amplitude * signed_unit(rng);
                value = std::clamp(value, 0.0, 1.0);
            }
        }
        frames.push_back(quantize(raw));
        std::vector<Region> gt;
        for (auto& pixels : gt_pixels) {
            if (!pixels.empty()) gt.push_back(Region(std::move(pixels)));
        }
        ground_truth.push_back(std::move(gt));
    }
    return RenderResult{Sequence(std::move(frames)), std::move(ground_truth)};
}

}  // namespace hemd
