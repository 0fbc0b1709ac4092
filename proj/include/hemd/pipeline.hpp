#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hemd/forest.hpp"
#include "hemd/ilp.hpp"
#include "hemd/match.hpp"
#include "hemd/probmap.hpp"

namespace hemd {

struct PipelineConfig {
    Fraction tau{1, 2};     // lowest candidate threshold
    Fraction delta{7, 20};  // size-change gate
    int iterations = 10;    // matching iteration cap
    Connectivity connectivity = Connectivity::eight;
    GateForm gate_form = GateForm::printed;
    bool early_stop = true;  // stop once an iteration selects nothing
    int threads = 0;         // 0 = hardware concurrency
    bool collect_problems = false;  // stash solved problems in the report
};

// A selected instance: the originating node id plus a frozen copy of its
// region, immune to any later forest bookkeeping.
struct SelectedCandidate {
    int node_id = -1;
    Region region;
};

struct FrameState {
    std::shared_ptr<const CandidateForest> forest;
    std::vector<SelectedCandidate> selected;  // ascending node id
    ResidualForest residual;
};

struct SelectionState {
    std::vector<FrameState> frames;
    int iteration = 0;

    int frame_count() const { return static_cast<int>(frames.size()); }
    const FrameState& frame(int w) const {
        return frames[static_cast<std::size_t>(w)];
    }
};

// Selects every single-path root and removes those whole trees from the
// residual candidates.
SelectionState build_initial_state(
    std::vector<std::shared_ptr<const CandidateForest>> forests);

// Instance-instance matching between the selected sets of frames w and
// w+1. Matched members are reported so they sit out the instance-forest
// step; the selected sets themselves are unchanged.
struct EmdPartition {
    std::vector<int> unmatched_left;   // node ids in frame w
    std::vector<int> unmatched_right;  // node ids in frame w+1
    SolverStats stats;
};
EmdPartition emd_partition(const SelectionState& state, int w,
                           const Fraction& delta,
                           GateForm gate = GateForm::printed);

struct FlowChoice {
    int ref_id = -1;   // selected node id in the source frame
    int node_id = -1;  // chosen candidate node id in the target frame
    Fraction score;
};

// Chosen candidates of one residual tree plus their score sum.
struct TreeFlow {
    std::vector<FlowChoice> choices;
    Fraction score_sum;
};

// A directional matching result, grouped per residual tree (keyed by the
// residual root id) of the target frame.
struct DirectionalFlow {
    int source = -1;
    int target = -1;
    std::map<int, TreeFlow> trees;
    SolverStats stats;
};

// Matches the EMD-unmatched selected candidates of the source frame
// against the residual forest of the adjacent target frame.
DirectionalFlow hemd_directional(const SelectionState& state, int source,
                                 int target, const Fraction& delta,
                                 GateForm gate = GateForm::printed);

// Left-right-competing rule: per residual tree, adopt the left flow's
// choices when its score sum is >= the right's, otherwise the right's.
// Either flow may be absent at sequence boundaries. Returns newly selected
// node ids, ascending.
std::vector<int> combine_phi(const ResidualForest& frame_residual,
                             const DirectionalFlow* left,
                             const DirectionalFlow* right);

// Adds the per-frame newly selected nodes and removes their path closures
// from the residual forests. Throws DisjointnessError if a new region
// overlaps an already selected one in the same frame.
SelectionState update_state(SelectionState state,
                            const std::vector<std::vector<int>>& delta);

// Final selection: the selected instances plus every residual node with no
// surviving parent. Per frame, ordered by smallest pixel.
std::vector<std::vector<Region>> pad_remaining(const SelectionState& state);

struct IterationRecord {
    int iteration = 0;
    int newly_selected = 0;
    int selected_total = 0;
    int residual_total = 0;
    int ilp_problems = 0;
    std::int64_t ilp_nodes = 0;
};

// Everything in the report is deterministic for a given input and config;
// wall-clock durations are deliberately excluded.
struct RunReport {
    PipelineConfig config;
    int frames = 0;
    int iterations_run = 0;
    bool reached_fixed_point = false;
    std::vector<IterationRecord> iteration_log;
    std::vector<int> final_instance_counts;
    int total_ilp_problems = 0;
    std::int64_t total_ilp_nodes = 0;
    std::vector<MatchProblem> problems;  // only if config.collect_problems
};

// Full run: forests, initial state, iterative matching, padding, and
// label rendering.
std::vector<LabelMap> run(const Sequence& seq, const PipelineConfig& cfg,
                          RunReport* report = nullptr);

}  // namespace hemd
