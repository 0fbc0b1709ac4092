#include "hemd/match.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

namespace hemd {

namespace {

bool symmetric_gate(int size_r, int size_d, const Fraction& delta) {
    return Fraction(2 * std::abs(size_r - size_d), size_r + size_d) < delta;
}

bool asymmetric_gate(int size_r, int size_d, const Fraction& delta) {
    return Fraction(std::abs(size_r - size_d), size_r) < delta;
}

bool gate_passes(MatchKind kind, GateForm form, const Region& r,
                 const Region& d, const Fraction& delta) {
    switch (form) {
        case GateForm::symmetric:
            return symmetric_gate(r.size(), d.size(), delta);
        case GateForm::asymmetric:
            return asymmetric_gate(r.size(), d.size(), delta);
        case GateForm::printed:
            break;
    }
    return kind == MatchKind::emd ? symmetric_gate(r.size(), d.size(), delta)
                                  : asymmetric_gate(r.size(), d.size(), delta);
}

}  // namespace

bool emd_gate(const Region& r, const Region& d, const Fraction& delta) {
    return symmetric_gate(r.size(), d.size(), delta);
}

bool hemd_gate(const Region& r, const Region& d, const Fraction& delta) {
    return asymmetric_gate(r.size(), d.size(), delta);
}

MatchProblem build_emd_problem(std::span<const CandidateRef> refs,
                               std::span<const CandidateRef> targets,
                               const Fraction& delta, GateForm gate) {
    MatchProblem problem;
    problem.kind = MatchKind::emd;
    std::vector<std::vector<int>> ref_rows(refs.size());
    std::vector<std::vector<int>> target_rows(targets.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const Region& r = *refs[i].region;
            const Region& d = *targets[j].region;
            if (!gate_passes(MatchKind::emd, gate, r, d, delta)) continue;
            Fraction score = iou(r, d);
            if (score == 0) continue;
            const int var = problem.variable_count();
            problem.variables.push_back(
                MatchVariable{refs[i].id, targets[j].id, std::move(score)});
            ref_rows[i].push_back(var);
            target_rows[j].push_back(var);
        }
    }
    for (auto& row : target_rows) problem.rows.push_back(std::move(row));
    for (auto& row : ref_rows) problem.rows.push_back(std::move(row));
    return problem;
}

MatchProblem build_hemd_problem(std::span<const CandidateRef> refs,
                                const ResidualForest& residual,
                                const Fraction& delta, GateForm gate) {
    MatchProblem problem;
    problem.kind = MatchKind::hemd;
    const std::vector<int> nodes = residual.alive_ids();
    std::vector<std::vector<int>> ref_rows(refs.size());
    // Variables whose target is a given node, for path row assembly.
    std::unordered_map<int, std::vector<int>> node_vars;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const Region& r = *refs[i].region;
        for (int node_id : nodes) {
            const Region& d = residual.forest().node(node_id).region;
            if (!gate_passes(MatchKind::hemd, gate, r, d, delta)) continue;
            Fraction score = iou(r, d);
            if (score == 0) continue;
            const int var = problem.variable_count();
            problem.variables.push_back(
                MatchVariable{refs[i].id, node_id, std::move(score)});
            ref_rows[i].push_back(var);
            node_vars[node_id].push_back(var);
        }
    }
    for (auto& row : ref_rows) problem.rows.push_back(std::move(row));
    for (const std::vector<int>& path : residual.residual_paths()) {
        std::vector<int> row;
        for (int node_id : path) {
            const auto it = node_vars.find(node_id);
            if (it != node_vars.end()) {
                row.insert(row.end(), it->second.begin(), it->second.end());
            }
        }
        std::sort(row.begin(), row.end());
        problem.rows.push_back(std::move(row));
    }
    return problem;
}

}  // namespace hemd
