#pragma once

#include <chrono>
#include <cstdint>
#include <utility>

#include "hemd/match.hpp"

namespace hemd {

struct SolverStats {
    std::int64_t nodes_explored = 0;
    Fraction best_bound;  // optimistic bound at the search root
    std::chrono::nanoseconds elapsed{0};
};

// Exact maximization by best-bound-pruned depth-first branch and bound.
// Among all optimal feasible subsets, returns the lexicographically
// smallest ascending index set; repeated solves are identical.
std::pair<MatchSolution, SolverStats> solve_exact(const MatchProblem& p);

// Independent oracle: plain enumeration over variables in index order with
// the same tie-break. Throws TooLargeError above 25 variables.
MatchSolution solve_bruteforce(const MatchProblem& p);

inline constexpr int kBruteforceVariableCap = 25;

// True iff every capacity-1 row contains at most one chosen variable.
// Throws IndexError on out-of-range variable indices.
bool check_feasible(const MatchProblem& p, const MatchSolution& s);

}  // namespace hemd
