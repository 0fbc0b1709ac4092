#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <memory>

#include "hemd/baselines.hpp"
#include "hemd/pipeline.hpp"

using namespace hemd;

namespace {

const Fraction kDelta(35, 100);

ProbMap map_from_levels(int h, int w, std::vector<int> levels) {
    std::vector<std::uint8_t> bytes(levels.begin(), levels.end());
    return ProbMap(h, w, std::move(bytes));
}

Sequence seq_from_levels(int h, int w, std::vector<std::vector<int>> frames) {
    std::vector<ProbMap> maps;
    for (auto& levels : frames) {
        maps.push_back(map_from_levels(h, w, std::move(levels)));
    }
    return Sequence(std::move(maps));
}

SelectionState state_of(const Sequence& seq, double tau = 0.5) {
    std::vector<std::shared_ptr<const CandidateForest>> forests;
    for (const ProbMap& frame : seq.frames()) {
        forests.push_back(std::make_shared<const CandidateForest>(
            build_forest(frame, tau)));
    }
    return build_initial_state(std::move(forests));
}

Region make_region(std::initializer_list<std::int32_t> pixels) {
    return Region(std::vector<std::int32_t>(pixels));
}

int node_with_region(const CandidateForest& f, const Region& region) {
    for (const CandidateNode& node : f.nodes()) {
        if (node.region == region) return node.id;
    }
    REQUIRE(false);
    return -1;
}

std::vector<Region> selected_regions(const FrameState& frame) {
    std::vector<Region> out;
    for (const SelectedCandidate& sel : frame.selected) {
        out.push_back(sel.region);
    }
    return out;
}

}  // namespace

TEST_CASE("initial state selects single-path roots and consumes their trees") {
    // Frame 0 is a chain, frame 1 branches, frame 2 is blank.
    const Sequence seq = seq_from_levels(
        1, 3, {{90, 70, 60}, {90, 60, 80}, {0, 0, 0}});
    const SelectionState state = state_of(seq);
    REQUIRE(state.frame_count() == 3);

    CHECK(state.frame(0).selected.size() == 1);
    CHECK(state.frame(0).selected[0].region == make_region({0, 1, 2}));
    CHECK(state.frame(0).residual.empty());

    CHECK(state.frame(1).selected.empty());
    CHECK(state.frame(1).residual.alive_count() == 3);

    CHECK(state.frame(2).selected.empty());
    CHECK(state.frame(2).residual.empty());
    CHECK(state.iteration == 0);
}

TEST_CASE("emd partition") {
    SUBCASE("identical selected sets match perfectly") {
        const std::vector<int> cells{90, 90, 0, 0, 85, 85, 0};
        const Sequence seq = seq_from_levels(1, 7, {cells, cells});
        const SelectionState state = state_of(seq);
        REQUIRE(state.frame(0).selected.size() == 2);
        const EmdPartition part = emd_partition(state, 0, kDelta);
        CHECK(part.unmatched_left.empty());
        CHECK(part.unmatched_right.empty());
    }
    SUBCASE("no cross-frame overlap leaves everything unmatched") {
        const Sequence seq = seq_from_levels(
            1, 8, {{90, 90, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 90, 90, 0, 0}});
        const SelectionState state = state_of(seq);
        const EmdPartition part = emd_partition(state, 0, kDelta);
        CHECK(part.unmatched_left.size() == 1);
        CHECK(part.unmatched_right.size() == 1);
    }
    SUBCASE("two against two with one valid pair") {
        const Sequence seq = seq_from_levels(
            1, 24,
            {{0, 90, 90, 0, 0, 0, 0, 0, 0, 0, 90, 90, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
             {0, 0, 90, 90, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 90, 90, 0, 0}});
        const SelectionState state = state_of(seq);
        REQUIRE(state.frame(0).selected.size() == 2);
        REQUIRE(state.frame(1).selected.size() == 2);
        const EmdPartition part = emd_partition(state, 0, kDelta);
        REQUIRE(part.unmatched_left.size() == 1);
        REQUIRE(part.unmatched_right.size() == 1);
        CHECK(state.frame(0).forest->node(part.unmatched_left[0]).region ==
              make_region({10, 11}));
        CHECK(state.frame(1).forest->node(part.unmatched_right[0]).region ==
              make_region({20, 21}));
    }
}

TEST_CASE("directional flow into a branching frame") {
    // Frame 0: two separated cells; frame 1: the same cells merged at the
    // low threshold with two surviving lobes.
    const Sequence seq = seq_from_levels(
        1, 7, {{90, 90, 0, 0, 80, 80, 0}, {90, 90, 55, 55, 80, 80, 0}});
    const SelectionState state = state_of(seq);
    REQUIRE(state.frame(0).selected.size() == 2);
    REQUIRE(state.frame(1).selected.empty());

    const DirectionalFlow flow = hemd_directional(state, 0, 1, kDelta);
    REQUIRE(flow.trees.size() == 1);
    const TreeFlow& tree = flow.trees.begin()->second;
    REQUIRE(tree.choices.size() == 2);
    CHECK(tree.score_sum == Fraction(2));  // both lobes match exactly

    std::vector<Region> chosen;
    for (const FlowChoice& choice : tree.choices) {
        chosen.push_back(state.frame(1).forest->node(choice.node_id).region);
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const Region& a, const Region& b) {
                  return a.min_pixel() < b.min_pixel();
              });
    CHECK(chosen[0] == make_region({0, 1}));
    CHECK(chosen[1] == make_region({4, 5}));

    SUBCASE("empty source set produces an empty flow") {
        const DirectionalFlow reverse = hemd_directional(state, 1, 0, kDelta);
        CHECK(reverse.trees.empty());
    }
}

TEST_CASE("combine_phi") {
    const ProbMap p = map_from_levels(1, 3, {90, 60, 80});
    auto forest = std::make_shared<const CandidateForest>(build_forest(p, 0.5));
    const ResidualForest residual(forest);
    const int root = forest->roots()[0];
    const int left_leaf = node_with_region(*forest, make_region({0}));
    const int right_leaf = node_with_region(*forest, make_region({2}));

    DirectionalFlow from_left;
    from_left.trees[root] =
        TreeFlow{{FlowChoice{7, left_leaf, Fraction(1, 2)}}, Fraction(1, 2)};
    DirectionalFlow from_right;
    from_right.trees[root] =
        TreeFlow{{FlowChoice{9, right_leaf, Fraction(3, 4)}}, Fraction(3, 4)};

    SUBCASE("missing right flow adopts the left wholesale") {
        CHECK(combine_phi(residual, &from_left, nullptr) ==
              std::vector<int>{left_leaf});
    }
    SUBCASE("missing left flow adopts the right wholesale") {
        CHECK(combine_phi(residual, nullptr, &from_right) ==
              std::vector<int>{right_leaf});
    }
    SUBCASE("larger right sum wins the tree") {
        CHECK(combine_phi(residual, &from_left, &from_right) ==
              std::vector<int>{right_leaf});
    }
    SUBCASE("equal sums keep the left flow") {
        DirectionalFlow right_tied;
        right_tied.trees[root] = TreeFlow{
            {FlowChoice{9, right_leaf, Fraction(1, 2)}}, Fraction(1, 2)};
        CHECK(combine_phi(residual, &from_left, &right_tied) ==
              std::vector<int>{left_leaf});
    }
    SUBCASE("no flows at all") {
        CHECK(combine_phi(residual, nullptr, nullptr).empty());
    }
}

TEST_CASE("combine_phi arbitrates per tree") {
    // Two separate two-leaf trees in one frame.
    const ProbMap p =
        map_from_levels(1, 7, {90, 60, 80, 0, 90, 60, 80});
    auto forest = std::make_shared<const CandidateForest>(build_forest(p, 0.5));
    const ResidualForest residual(forest);
    REQUIRE(forest->roots().size() == 2);
    const int tree_a = residual.residual_tree_root(
        node_with_region(*forest, make_region({0})));
    const int tree_b = residual.residual_tree_root(
        node_with_region(*forest, make_region({4})));
    const int a_left = node_with_region(*forest, make_region({0}));
    const int a_right = node_with_region(*forest, make_region({2}));
    const int b_left = node_with_region(*forest, make_region({4}));
    const int b_right = node_with_region(*forest, make_region({6}));

    DirectionalFlow from_left;
    from_left.trees[tree_a] =
        TreeFlow{{FlowChoice{1, a_left, Fraction(9, 10)}}, Fraction(9, 10)};
    from_left.trees[tree_b] =
        TreeFlow{{FlowChoice{2, b_left, Fraction(1, 10)}}, Fraction(1, 10)};
    DirectionalFlow from_right;
    from_right.trees[tree_a] =
        TreeFlow{{FlowChoice{3, a_right, Fraction(4, 10)}}, Fraction(4, 10)};
    from_right.trees[tree_b] =
        TreeFlow{{FlowChoice{4, b_right, Fraction(8, 10)}}, Fraction(8, 10)};

    std::vector<int> expected{a_left, b_right};
    std::sort(expected.begin(), expected.end());
    CHECK(combine_phi(residual, &from_left, &from_right) == expected);
}

TEST_CASE("update_state removes path closures") {
    const Sequence seq = seq_from_levels(1, 3, {{90, 60, 80}});
    SelectionState state = state_of(seq);
    const CandidateForest& forest = *state.frame(0).forest;
    const int left_leaf = node_with_region(forest, make_region({0}));
    const int right_leaf = node_with_region(forest, make_region({2}));

    SUBCASE("selecting a leaf keeps the sibling as a residual root") {
        state = update_state(std::move(state), {{left_leaf}});
        CHECK(state.iteration == 1);
        CHECK(state.frame(0).selected.size() == 1);
        CHECK(state.frame(0).residual.alive_count() == 1);
        CHECK(state.frame(0).residual.residual_roots() ==
              std::vector<int>{right_leaf});
    }
    SUBCASE("selecting a residual root consumes its whole tree") {
        const int root = forest.roots()[0];
        state = update_state(std::move(state), {{root}});
        CHECK(state.frame(0).residual.empty());
    }
    SUBCASE("empty delta only advances the iteration counter") {
        state = update_state(std::move(state), {{}});
        CHECK(state.iteration == 1);
        CHECK(state.frame(0).selected.empty());
        CHECK(state.frame(0).residual.alive_count() == 3);
    }
    SUBCASE("selecting a dead node is rejected") {
        state = update_state(std::move(state), {{left_leaf}});
        CHECK_THROWS_AS(update_state(std::move(state), {{forest.roots()[0]}}),
                        UnknownNodeError);
    }
    SUBCASE("overlap with an existing selection is rejected") {
        state.frames[0].selected.push_back(
            SelectedCandidate{99, make_region({0, 1, 2})});
        CHECK_THROWS_AS(update_state(std::move(state), {{left_leaf}}),
                        DisjointnessError);
    }
}

TEST_CASE("pad_remaining") {
    SUBCASE("empty residual pads nothing") {
        const Sequence seq = seq_from_levels(1, 3, {{90, 70, 60}});
        const SelectionState state = state_of(seq);
        const auto final_regions = pad_remaining(state);
        REQUIRE(final_regions.size() == 1);
        REQUIRE(final_regions[0].size() == 1);
        CHECK(final_regions[0][0] == make_region({0, 1, 2}));
    }
    SUBCASE("untouched branching tree pads its original root") {
        const Sequence seq = seq_from_levels(1, 3, {{90, 60, 80}});
        const SelectionState state = state_of(seq);
        const auto final_regions = pad_remaining(state);
        REQUIRE(final_regions[0].size() == 1);
        CHECK(final_regions[0][0] == make_region({0, 1, 2}));
    }
    SUBCASE("surviving sibling leaf is padded after a selection") {
        const Sequence seq = seq_from_levels(1, 3, {{90, 60, 80}});
        SelectionState state = state_of(seq);
        const int left_leaf =
            node_with_region(*state.frame(0).forest, make_region({0}));
        state = update_state(std::move(state), {{left_leaf}});
        const auto final_regions = pad_remaining(state);
        REQUIRE(final_regions[0].size() == 2);
        CHECK(final_regions[0][0] == make_region({0}));
        CHECK(final_regions[0][1] == make_region({2}));
    }
}

TEST_CASE("run on a single frame selects roots and pads the rest") {
    const Sequence seq =
        seq_from_levels(1, 7, {{90, 70, 0, 90, 60, 80, 0}});
    PipelineConfig cfg;
    RunReport report;
    const auto labels = run(seq, cfg, &report);
    REQUIRE(labels.size() == 1);
    // Chain root {0,1} selected initially; branching root {3,4,5} padded.
    CHECK(labels[0].grid.values ==
          std::vector<std::uint32_t>{1, 1, 0, 2, 2, 2, 0});
    CHECK(report.final_instance_counts == std::vector<int>{2});
    CHECK(report.reached_fixed_point);
}

TEST_CASE("chains-only sequences reproduce fixed-threshold components") {
    const std::vector<int> frame{90, 90, 0, 0, 85, 0, 0, 70, 70};
    const Sequence seq = seq_from_levels(1, 9, {frame, frame, frame});
    PipelineConfig cfg;
    const auto labels = run(seq, cfg);
    const auto baseline = threshold_components(seq.frame(0), 0.5);
    const LabelMap expected =
        label_map_from_regions(baseline, seq.height(), seq.width());
    for (const LabelMap& label : labels) {
        CHECK(label == expected);
    }
}

TEST_CASE("two-frame merge is separated by the matching flow") {
    const Sequence seq = seq_from_levels(
        1, 7, {{90, 90, 0, 0, 80, 80, 0}, {90, 90, 55, 55, 80, 80, 0}});
    PipelineConfig cfg;
    RunReport report;
    const auto labels = run(seq, cfg, &report);
    REQUIRE(labels.size() == 2);
    CHECK(report.final_instance_counts == std::vector<int>{2, 2});
    // Frame 1 splits into the two lobes; the 0.55 bridge stays background.
    CHECK(labels[1].grid.values ==
          std::vector<std::uint32_t>{1, 1, 0, 0, 2, 2, 0});
    CHECK(report.reached_fixed_point);
    CHECK(report.iteration_log.size() == 2);
    CHECK(report.iteration_log[0].newly_selected == 2);
    CHECK(report.iteration_log[1].newly_selected == 0);
}

TEST_CASE("merge propagates frame by frame to a fixed point") {
    const std::vector<int> clean{90, 90, 0, 0, 80, 80, 0};
    const std::vector<int> merged{90, 90, 55, 55, 80, 80, 0};
    const Sequence seq =
        seq_from_levels(1, 7, {clean, clean, merged, merged, merged});
    PipelineConfig cfg;
    RunReport report;
    const auto labels = run(seq, cfg, &report);
    CHECK(report.final_instance_counts ==
          std::vector<int>{2, 2, 2, 2, 2});
    // One merged frame resolves per iteration, then one empty iteration.
    CHECK(report.iterations_run == 4);
    CHECK(report.reached_fixed_point);

    SUBCASE("a higher iteration cap changes nothing past the fixed point") {
        PipelineConfig more = cfg;
        more.iterations = cfg.iterations + 5;
        const auto again = run(seq, more);
        REQUIRE(again.size() == labels.size());
        for (std::size_t w = 0; w < labels.size(); ++w) {
            CHECK(again[w] == labels[w]);
        }
    }
    SUBCASE("disabling early stop changes nothing") {
        PipelineConfig full = cfg;
        full.early_stop = false;
        RunReport full_report;
        const auto again = run(seq, full, &full_report);
        CHECK(full_report.iterations_run == cfg.iterations);
        for (std::size_t w = 0; w < labels.size(); ++w) {
            CHECK(again[w] == labels[w]);
        }
    }
}

TEST_CASE("monotone selection and selection/residual separation") {
    const std::vector<int> clean{90, 90, 0, 0, 80, 80, 0};
    const std::vector<int> merged{90, 90, 55, 55, 80, 80, 0};
    const Sequence seq = seq_from_levels(1, 7, {clean, merged, merged});

    std::vector<std::shared_ptr<const CandidateForest>> forests;
    for (const ProbMap& frame : seq.frames()) {
        forests.push_back(std::make_shared<const CandidateForest>(
            build_forest(frame, 0.5)));
    }
    SelectionState state = build_initial_state(std::move(forests));

    for (int iteration = 1; iteration <= 4; ++iteration) {
        std::vector<std::vector<int>> previous_selected;
        for (const FrameState& frame : state.frames) {
            std::vector<int> ids;
            for (const SelectedCandidate& sel : frame.selected) {
                ids.push_back(sel.node_id);
            }
            previous_selected.push_back(std::move(ids));
        }

        std::vector<EmdPartition> parts;
        for (int w = 0; w + 1 < state.frame_count(); ++w) {
            parts.push_back(emd_partition(state, w, kDelta));
        }
        std::vector<std::vector<int>> delta(
            static_cast<std::size_t>(state.frame_count()));
        for (int w = 0; w < state.frame_count(); ++w) {
            DirectionalFlow left, right;
            const DirectionalFlow* left_ptr = nullptr;
            const DirectionalFlow* right_ptr = nullptr;
            if (w > 0) {
                left = hemd_directional(state, w - 1, w, kDelta);
                left_ptr = &left;
            }
            if (w + 1 < state.frame_count()) {
                right = hemd_directional(state, w + 1, w, kDelta);
                right_ptr = &right;
            }
            delta[static_cast<std::size_t>(w)] =
                combine_phi(state.frame(w).residual, left_ptr, right_ptr);
        }
        state = update_state(std::move(state), delta);

        for (int w = 0; w < state.frame_count(); ++w) {
            const FrameState& frame = state.frame(w);
            // S_t grows monotonically.
            for (int id : previous_selected[static_cast<std::size_t>(w)]) {
                const bool still = std::any_of(
                    frame.selected.begin(), frame.selected.end(),
                    [id](const SelectedCandidate& sel) {
                        return sel.node_id == id;
                    });
                CHECK(still);
            }
            // No node is simultaneously selected and residual.
            for (const SelectedCandidate& sel : frame.selected) {
                if (frame.forest->valid_id(sel.node_id)) {
                    CHECK_FALSE(frame.residual.alive(sel.node_id));
                }
            }
        }
    }
}

TEST_CASE("a frame is unaffected by all-zero neighbors") {
    const std::vector<int> frame{90, 60, 80, 0, 70, 70, 0};
    const std::vector<int> zeros(7, 0);
    PipelineConfig cfg;

    const auto alone = run(seq_from_levels(1, 7, {frame}), cfg);
    const auto embedded =
        run(seq_from_levels(1, 7, {zeros, frame, zeros}), cfg);
    REQUIRE(alone.size() == 1);
    REQUIRE(embedded.size() == 3);
    CHECK(embedded[1] == alone[0]);
    CHECK(embedded[0].grid.values == std::vector<std::uint32_t>(7, 0));
}

TEST_CASE("iters zero keeps the initial selection plus padding") {
    const Sequence seq = seq_from_levels(
        1, 7, {{90, 90, 0, 0, 80, 80, 0}, {90, 90, 55, 55, 80, 80, 0}});
    PipelineConfig cfg;
    cfg.iterations = 0;
    RunReport report;
    const auto labels = run(seq, cfg, &report);
    // No matching: the merged frame pads its root as a single instance.
    CHECK(report.final_instance_counts == std::vector<int>{2, 1});
    CHECK(labels[1].grid.values ==
          std::vector<std::uint32_t>{1, 1, 1, 1, 1, 1, 0});
    CHECK(report.iterations_run == 0);
}

TEST_CASE("thread count does not change results") {
    const std::vector<int> clean{90, 90, 0, 0, 80, 80, 0};
    const std::vector<int> merged{90, 90, 55, 55, 80, 80, 0};
    const Sequence seq =
        seq_from_levels(1, 7, {clean, merged, merged, clean, merged});
    PipelineConfig one;
    one.threads = 1;
    PipelineConfig many;
    many.threads = 8;
    RunReport report_one, report_many;
    const auto labels_one = run(seq, one, &report_one);
    const auto labels_many = run(seq, many, &report_many);
    REQUIRE(labels_one.size() == labels_many.size());
    for (std::size_t w = 0; w < labels_one.size(); ++w) {
        CHECK(labels_one[w] == labels_many[w]);
    }
    CHECK(report_one.final_instance_counts == report_many.final_instance_counts);
    CHECK(report_one.total_ilp_nodes == report_many.total_ilp_nodes);
}
