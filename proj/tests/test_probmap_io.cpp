#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hemd/io.hpp"
#include "hemd/probmap.hpp"

using namespace hemd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("hemd_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

ProbMap random_probmap(std::mt19937& rng, int h, int w) {
    std::uniform_int_distribution<int> level(0, 100);
    std::vector<std::uint8_t> levels(static_cast<std::size_t>(h) * w);
    for (auto& v : levels) v = static_cast<std::uint8_t>(level(rng));
    return ProbMap(h, w, std::move(levels));
}

}  // namespace

TEST_CASE("quantize rounds half-up to 2 decimals") {
    const Grid2D<double> raw(1, 4, {0.004999, 0.005, 1.0, 0.9949999});
    const ProbMap p = quantize(raw);
    CHECK(p.level(0) == 0);
    CHECK(p.level(1) == 1);
    CHECK(p.level(2) == 100);
    CHECK(p.level(3) == 99);
}

TEST_CASE("quantize clamps the 1e-9 fringe and rejects beyond") {
    CHECK(quantize(Grid2D<double>(1, 1, {-5e-10})).level(0) == 0);
    CHECK(quantize(Grid2D<double>(1, 1, {1.0 + 5e-10})).level(0) == 100);
    CHECK_THROWS_AS(quantize(Grid2D<double>(1, 1, {-1e-6})), RangeError);
    CHECK_THROWS_AS(quantize(Grid2D<double>(1, 1, {1.0001})), RangeError);
}

TEST_CASE("quantize is idempotent") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    Grid2D<double> raw(8, 8, 0.0);
    for (auto& v : raw.values) v = value(rng);
    const ProbMap once = quantize(raw);
    Grid2D<double> again(8, 8, 0.0);
    for (std::size_t i = 0; i < again.values.size(); ++i) {
        again.values[i] = once.value(static_cast<std::int32_t>(i));
    }
    CHECK(quantize(again) == once);
}

TEST_CASE("prob_to_level") {
    CHECK(prob_to_level(Fraction(1, 2)) == 50);
    CHECK(prob_to_level(Fraction(13, 20)) == 65);  // 0.65
    CHECK(prob_to_level(Fraction(651, 1000)) == 66);
    CHECK(prob_to_level(0.5) == 50);
    CHECK(prob_to_level(0.65) == 65);
    CHECK(prob_to_level(0.0) == 0);
    CHECK(prob_to_level(1.0) == 100);
}

TEST_CASE("sequence invariants") {
    std::mt19937 rng(3);
    CHECK_THROWS_AS(Sequence({}), EmptyError);
    std::vector<ProbMap> mixed;
    mixed.push_back(random_probmap(rng, 4, 4));
    mixed.push_back(random_probmap(rng, 5, 5));
    CHECK_THROWS_AS(Sequence(std::move(mixed)), ShapeError);
}

TEST_CASE("save/load round-trip is the identity on quantized values") {
    std::mt19937 rng(11);
    std::vector<ProbMap> frames;
    for (int w = 0; w < 3; ++w) frames.push_back(random_probmap(rng, 6, 5));
    const Sequence seq(std::move(frames));

    for (const FrameFormat format : {FrameFormat::pgm16, FrameFormat::rawf32}) {
        CAPTURE(to_string(format));
        TempDir dir("seq_" + to_string(format));
        save_sequence(seq, dir.path, format);
        const Sequence loaded = load_sequence(dir.path, format);
        REQUIRE(loaded.frame_count() == seq.frame_count());
        for (int w = 0; w < seq.frame_count(); ++w) {
            CHECK(loaded.frame(w) == seq.frame(w));
        }
    }
}

TEST_CASE("load_sequence error paths") {
    SUBCASE("empty directory") {
        TempDir dir("empty");
        CHECK_THROWS_AS(load_sequence(dir.path, FrameFormat::pgm16),
                        EmptyError);
    }
    SUBCASE("missing directory") {
        CHECK_THROWS_AS(
            load_sequence(fs::path("/nonexistent_hemd"), FrameFormat::pgm16),
            IoError);
    }
    SUBCASE("bad header") {
        TempDir dir("badheader");
        std::ofstream(dir.path / "frame_0000.pgm") << "P2\n1 1\n255\n0\n";
        CHECK_THROWS_AS(load_sequence(dir.path, FrameFormat::pgm16),
                        FormatError);
    }
    SUBCASE("mixed frame sizes") {
        TempDir dir("mixed");
        std::mt19937 rng(5);
        save_sequence(Sequence({random_probmap(rng, 4, 4)}), dir.path,
                      FrameFormat::pgm16);
        const auto grid = Grid2D<std::uint16_t>(5, 5, std::uint16_t{0});
        write_pgm16(dir.path / "frame_0001.pgm", grid);
        CHECK_THROWS_AS(load_sequence(dir.path, FrameFormat::pgm16),
                        ShapeError);
    }
    SUBCASE("rawf32 values outside [0,1]") {
        TempDir dir("range");
        write_rawf32(dir.path / "frame_0000.hprb",
                     Grid2D<float>(1, 1, {1.5f}));
        CHECK_THROWS_AS(load_sequence(dir.path, FrameFormat::rawf32),
                        FormatError);
    }
}

TEST_CASE("save_labels writes 16-bit pgm plus counts sidecar") {
    TempDir dir("labels");
    const std::vector<Region> regions{Region({0}), Region({2, 3})};
    std::vector<LabelMap> labels{label_map_from_regions(regions, 2, 2)};
    save_labels(labels, dir.path);

    const auto grids = load_label_grids(dir.path);
    REQUIRE(grids.size() == 1);
    CHECK(grids[0] == labels[0].grid);

    std::ifstream sidecar(dir.path / "counts.json");
    REQUIRE(sidecar.good());
    std::string text((std::istreambuf_iterator<char>(sidecar)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("\"instance_counts\"") != std::string::npos);
}

TEST_CASE("save_labels rejects labels over 16 bits") {
    TempDir dir("overflow");
    Grid2D<std::uint32_t> grid(1, 1, {70000u});
    std::vector<LabelMap> labels{LabelMap{std::move(grid)}};
    CHECK_THROWS_AS(save_labels(labels, dir.path), LabelOverflowError);
}
