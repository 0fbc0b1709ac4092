#include "hemd/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "parallel.hpp"

namespace hemd {

namespace {

std::vector<CandidateRef> selected_refs(const FrameState& frame) {
    std::vector<CandidateRef> refs;
    refs.reserve(frame.selected.size());
    for (const SelectedCandidate& sel : frame.selected) {
        refs.push_back(CandidateRef{sel.node_id, &sel.region});
    }
    return refs;
}

std::vector<CandidateRef> selected_refs_subset(const FrameState& frame,
                                               const std::vector<int>& ids) {
    std::vector<CandidateRef> refs;
    refs.reserve(ids.size());
    for (const SelectedCandidate& sel : frame.selected) {
        if (std::binary_search(ids.begin(), ids.end(), sel.node_id)) {
            refs.push_back(CandidateRef{sel.node_id, &sel.region});
        }
    }
    return refs;
}

struct PairSolve {
    MatchProblem problem;
    MatchSolution solution;
    SolverStats stats;
    std::vector<int> unmatched_left;
    std::vector<int> unmatched_right;
};

PairSolve solve_emd_for_pair(const SelectionState& state, int w,
                             const Fraction& delta, GateForm gate) {
    if (w < 0 || w + 1 >= state.frame_count()) {
        throw IndexError("frame pair out of range: " + std::to_string(w));
    }
    const FrameState& left = state.frame(w);
    const FrameState& right = state.frame(w + 1);
    PairSolve out;
    const auto refs = selected_refs(left);
    const auto targets = selected_refs(right);
    out.problem = build_emd_problem(refs, targets, delta, gate);
    auto [solution, stats] = solve_exact(out.problem);
    out.solution = std::move(solution);
    out.stats = std::move(stats);
    std::set<int> matched_left, matched_right;
    for (int var : out.solution.chosen) {
        const auto& variable =
            out.problem.variables[static_cast<std::size_t>(var)];
        matched_left.insert(variable.ref_id);
        matched_right.insert(variable.target_id);
    }
    for (const SelectedCandidate& sel : left.selected) {
        if (!matched_left.count(sel.node_id)) {
            out.unmatched_left.push_back(sel.node_id);
        }
    }
    for (const SelectedCandidate& sel : right.selected) {
        if (!matched_right.count(sel.node_id)) {
            out.unmatched_right.push_back(sel.node_id);
        }
    }
    return out;
}

struct FlowSolve {
    MatchProblem problem;
    DirectionalFlow flow;
};

FlowSolve solve_hemd_flow(const SelectionState& state, int source, int target,
                          const std::vector<int>& ref_ids,
                          const Fraction& delta, GateForm gate) {
    if (std::abs(source - target) != 1) {
        throw IndexError("directional matching requires adjacent frames");
    }
    const FrameState& source_frame = state.frame(source);
    const FrameState& target_frame = state.frame(target);
    FlowSolve out;
    out.flow.source = source;
    out.flow.target = target;
    const auto refs = selected_refs_subset(source_frame, ref_ids);
    out.problem = build_hemd_problem(refs, target_frame.residual, delta, gate);
    auto [solution, stats] = solve_exact(out.problem);
    out.flow.stats = std::move(stats);
    for (int var : solution.chosen) {
        const auto& variable =
            out.problem.variables[static_cast<std::size_t>(var)];
        const int tree = target_frame.residual.residual_tree_root(variable.target_id);
        TreeFlow& flow = out.flow.trees[tree];
        flow.choices.push_back(
            FlowChoice{variable.ref_id, variable.target_id, variable.score});
        flow.score_sum += variable.score;
    }
    return out;
}

}  // namespace

SelectionState build_initial_state(
    std::vector<std::shared_ptr<const CandidateForest>> forests) {
    SelectionState state;
    state.frames.reserve(forests.size());
    for (auto& forest : forests) {
        FrameState frame;
        frame.forest = forest;
        frame.residual = ResidualForest(forest);
        for (int root : single_path_roots(*forest)) {
            frame.selected.push_back(
                SelectedCandidate{root, forest->node(root).region});
        }
        // Every tree owning a selected root is consumed outright.
        for (const SelectedCandidate& sel : frame.selected) {
            frame.residual.remove_closure(sel.node_id);
        }
        state.frames.push_back(std::move(frame));
    }
    return state;
}

EmdPartition emd_partition(const SelectionState& state, int w,
                           const Fraction& delta, GateForm gate) {
    PairSolve solve = solve_emd_for_pair(state, w, delta, gate);
    EmdPartition out;
    out.unmatched_left = std::move(solve.unmatched_left);
    out.unmatched_right = std::move(solve.unmatched_right);
    out.stats = std::move(solve.stats);
    return out;
}

DirectionalFlow hemd_directional(const SelectionState& state, int source,
                                 int target, const Fraction& delta,
                                 GateForm gate) {
    const int pair = std::min(source, target);
    PairSolve partition = solve_emd_for_pair(state, pair, delta, gate);
    const std::vector<int>& refs = source == pair ? partition.unmatched_left
                                                  : partition.unmatched_right;
    return solve_hemd_flow(state, source, target, refs, delta, gate).flow;
}

std::vector<int> combine_phi(const ResidualForest& frame_residual,
                             const DirectionalFlow* left,
                             const DirectionalFlow* right) {
    std::set<int> trees;
    if (left) {
        for (const auto& [tree, flow] : left->trees) trees.insert(tree);
    }
    if (right) {
        for (const auto& [tree, flow] : right->trees) trees.insert(tree);
    }
    std::vector<int> out;
    for (int tree : trees) {
        if (!frame_residual.alive(tree)) {
            throw UnknownNodeError("flow tree root " + std::to_string(tree) +
                                   " is not residual");
        }
        const TreeFlow* left_flow = nullptr;
        const TreeFlow* right_flow = nullptr;
        if (left) {
            const auto it = left->trees.find(tree);
            if (it != left->trees.end()) left_flow = &it->second;
        }
        if (right) {
            const auto it = right->trees.find(tree);
            if (it != right->trees.end()) right_flow = &it->second;
        }
        const Fraction zero;
        const Fraction& left_sum = left_flow ? left_flow->score_sum : zero;
        const Fraction& right_sum = right_flow ? right_flow->score_sum : zero;
        const TreeFlow* winner = left_sum >= right_sum ? left_flow : right_flow;
        if (!winner) continue;
        for (const FlowChoice& choice : winner->choices) {
            out.push_back(choice.node_id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

SelectionState update_state(SelectionState state,
                            const std::vector<std::vector<int>>& delta) {
    if (delta.size() != state.frames.size()) {
        throw ShapeError("delta must provide one entry per frame");
    }
    for (std::size_t w = 0; w < state.frames.size(); ++w) {
        FrameState& frame = state.frames[w];
        for (int node_id : delta[w]) {
            if (!frame.forest->valid_id(node_id) ||
                !frame.residual.alive(node_id)) {
                throw UnknownNodeError("newly selected node " +
                                       std::to_string(node_id) +
                                       " is not residual");
            }
            Region region = frame.forest->node(node_id).region;
            for (const SelectedCandidate& sel : frame.selected) {
                if (!regions_disjoint(sel.region, region)) {
                    throw DisjointnessError(
                        "new selection overlaps an existing instance in frame " +
                        std::to_string(w));
                }
            }
            const auto pos = std::lower_bound(
                frame.selected.begin(), frame.selected.end(), node_id,
                [](const SelectedCandidate& sel, int id) {
                    return sel.node_id < id;
                });
            frame.selected.insert(
                pos, SelectedCandidate{node_id, std::move(region)});
            frame.residual.remove_closure(node_id);
        }
    }
    ++state.iteration;
    return state;
}

std::vector<std::vector<Region>> pad_remaining(const SelectionState& state) {
    std::vector<std::vector<Region>> out;
    out.reserve(state.frames.size());
    for (const FrameState& frame : state.frames) {
        std::vector<Region> regions;
        regions.reserve(frame.selected.size());
        for (const SelectedCandidate& sel : frame.selected) {
            regions.push_back(sel.region);
        }
        for (int root : frame.residual.residual_roots()) {
            regions.push_back(frame.forest->node(root).region);
        }
        std::sort(regions.begin(), regions.end(),
                  [](const Region& a, const Region& b) {
                      return a.min_pixel() < b.min_pixel();
                  });
        out.push_back(std::move(regions));
    }
    return out;
}

std::vector<LabelMap> run(const Sequence& seq, const PipelineConfig& cfg,
                          RunReport* report) {
    const int frame_count = seq.frame_count();
    const int tau_level = prob_to_level(cfg.tau);

    std::vector<std::shared_ptr<const CandidateForest>> forests(
        static_cast<std::size_t>(frame_count));
    detail::parallel_for_index(frame_count, cfg.threads, [&](int w) {
        forests[static_cast<std::size_t>(w)] =
            std::make_shared<const CandidateForest>(build_forest_level(
                seq.frame(w), tau_level, cfg.connectivity));
    });

    SelectionState state = build_initial_state(std::move(forests));

    RunReport local_report;
    RunReport& rep = report ? *report : local_report;
    rep = RunReport{};
    rep.config = cfg;
    rep.frames = frame_count;

    const int pair_count = frame_count - 1;
    for (int iteration = 1; iteration <= cfg.iterations; ++iteration) {
        std::vector<PairSolve> pairs(static_cast<std::size_t>(pair_count));
        detail::parallel_for_index(pair_count, cfg.threads, [&](int w) {
            pairs[static_cast<std::size_t>(w)] =
                solve_emd_for_pair(state, w, cfg.delta, cfg.gate_form);
        });

        // from_left[w]: flow into w from w-1; from_right[w]: from w+1.
        std::vector<std::optional<FlowSolve>> from_left(
            static_cast<std::size_t>(frame_count));
        std::vector<std::optional<FlowSolve>> from_right(
            static_cast<std::size_t>(frame_count));
        detail::parallel_for_index(2 * pair_count, cfg.threads, [&](int task) {
            if (task < pair_count) {
                const int w = task;  // pair (w, w+1), forward flow
                from_left[static_cast<std::size_t>(w + 1)] = solve_hemd_flow(
                    state, w, w + 1, pairs[static_cast<std::size_t>(w)].unmatched_left,
                    cfg.delta, cfg.gate_form);
            } else {
                const int w = task - pair_count;  // pair (w, w+1), backward flow
                from_right[static_cast<std::size_t>(w)] = solve_hemd_flow(
                    state, w + 1, w, pairs[static_cast<std::size_t>(w)].unmatched_right,
                    cfg.delta, cfg.gate_form);
            }
        });

        std::vector<std::vector<int>> delta(
            static_cast<std::size_t>(frame_count));
        int newly = 0;
        for (int w = 0; w < frame_count; ++w) {
            const auto& left = from_left[static_cast<std::size_t>(w)];
            const auto& right = from_right[static_cast<std::size_t>(w)];
            delta[static_cast<std::size_t>(w)] =
                combine_phi(state.frame(w).residual,
                            left ? &left->flow : nullptr,
                            right ? &right->flow : nullptr);
            newly += static_cast<int>(delta[static_cast<std::size_t>(w)].size());
        }

        state = update_state(std::move(state), delta);

        IterationRecord record;
        record.iteration = iteration;
        record.newly_selected = newly;
        for (const FrameState& frame : state.frames) {
            record.selected_total += static_cast<int>(frame.selected.size());
            record.residual_total += frame.residual.alive_count();
        }
        for (const PairSolve& pair : pairs) {
            ++record.ilp_problems;
            record.ilp_nodes += pair.stats.nodes_explored;
        }
        auto add_flow = [&record](const std::optional<FlowSolve>& flow) {
            if (!flow) return;
            ++record.ilp_problems;
            record.ilp_nodes += flow->flow.stats.nodes_explored;
        };
        for (const auto& flow : from_left) add_flow(flow);
        for (const auto& flow : from_right) add_flow(flow);
        rep.total_ilp_problems += record.ilp_problems;
        rep.total_ilp_nodes += record.ilp_nodes;
        rep.iteration_log.push_back(record);
        rep.iterations_run = iteration;

        if (cfg.collect_problems) {
            for (PairSolve& pair : pairs) {
                rep.problems.push_back(std::move(pair.problem));
            }
            for (auto& flow : from_left) {
                if (flow) rep.problems.push_back(std::move(flow->problem));
            }
            for (auto& flow : from_right) {
                if (flow) rep.problems.push_back(std::move(flow->problem));
            }
        }

        if (newly == 0 && cfg.early_stop) {
            rep.reached_fixed_point = true;
            break;
        }
    }

    const auto final_regions = pad_remaining(state);
    std::vector<LabelMap> labels;
    labels.reserve(final_regions.size());
    for (const auto& regions : final_regions) {
        labels.push_back(
            label_map_from_regions(regions, seq.height(), seq.width()));
        rep.final_instance_counts.push_back(static_cast<int>(regions.size()));
    }
    return labels;
}

}  // namespace hemd
