#pragma once

#include <span>
#include <vector>

#include "hemd/core.hpp"
#include "hemd/forest.hpp"
#include "hemd/fraction.hpp"

namespace hemd {

enum class MatchKind { emd, hemd };

// Size-change gate applied before a candidate pair becomes a variable.
// `printed` keeps the two published forms: symmetric for instance-instance
// matching, asymmetric (relative to the reference) for instance-forest
// matching. The other two force one form on both models.
enum class GateForm { printed, symmetric, asymmetric };

// One 0/1 flow variable f_{r,d} with its IoU score.
struct MatchVariable {
    int ref_id = -1;
    int target_id = -1;
    Fraction score;
};

// A weighted binary program: maximize the score sum of chosen variables
// subject to at most one chosen variable per row.
struct MatchProblem {
    MatchKind kind = MatchKind::emd;
    std::vector<MatchVariable> variables;
    std::vector<std::vector<int>> rows;  // variable indices, capacity 1 each

    int variable_count() const { return static_cast<int>(variables.size()); }
};

struct MatchSolution {
    std::vector<int> chosen;  // ascending variable indices
    Fraction objective;
};

// Non-owning (id, region) handle used when assembling problems.
struct CandidateRef {
    int id = -1;
    const Region* region = nullptr;
};

// True iff 2*| |r|-|d| | / (|r|+|d|) < delta.
bool emd_gate(const Region& r, const Region& d, const Fraction& delta);

// True iff | |r|-|d| | / |r| < delta.
bool hemd_gate(const Region& r, const Region& d, const Fraction& delta);

// Instance-instance matching between two flat families of disjoint
// regions. Variables exist for pairs with IoU > 0 passing the gate; one
// capacity-1 row per target, then one per ref.
MatchProblem build_emd_problem(std::span<const CandidateRef> refs,
                               std::span<const CandidateRef> targets,
                               const Fraction& delta,
                               GateForm gate = GateForm::printed);

// Instance-forest matching: refs against the alive nodes of a residual
// forest. One capacity-1 row per ref, then one per leaf-to-root path of
// the residual forest (each path row covers every variable whose node
// lies on that path).
MatchProblem build_hemd_problem(std::span<const CandidateRef> refs,
                                const ResidualForest& residual,
                                const Fraction& delta,
                                GateForm gate = GateForm::printed);

}  // namespace hemd
