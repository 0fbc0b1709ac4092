#include "hemd/ilp.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace hemd {

namespace {

// Rows containing each variable, in row order.
std::vector<std::vector<int>> rows_per_variable(const MatchProblem& p) {
    std::vector<std::vector<int>> var_rows(p.variables.size());
    for (std::size_t row = 0; row < p.rows.size(); ++row) {
        for (int var : p.rows[row]) {
            if (var < 0 || var >= p.variable_count()) {
                throw IndexError("row references unknown variable " +
                                 std::to_string(var));
            }
            var_rows[static_cast<std::size_t>(var)].push_back(
                static_cast<int>(row));
        }
    }
    for (std::size_t var = 0; var < var_rows.size(); ++var) {
        if (var_rows[var].empty()) {
            throw Error("variable " + std::to_string(var) +
                        " appears in no constraint row");
        }
    }
    return var_rows;
}

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct ExactSearch {
    const MatchProblem& problem;
    std::vector<std::vector<int>> var_rows;
    std::vector<int> order;       // branch order: score desc, index asc
    std::vector<int> row_used;
    std::vector<int> chosen;      // in branch order
    Fraction current;
    std::vector<int> best_chosen;  // sorted
    Fraction best_objective;
    std::int64_t nodes = 0;

    // Per-bound scratch for the first-row relaxation.
    std::vector<std::int64_t> bucket_stamp;
    std::vector<const Fraction*> bucket_best;
    std::int64_t stamp = 0;

    explicit ExactSearch(const MatchProblem& p)
        : problem(p),
          var_rows(rows_per_variable(p)),
          row_used(p.rows.size(), 0),
          bucket_stamp(p.rows.size(), -1),
          bucket_best(p.rows.size(), nullptr) {
        order.resize(p.variables.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&p](int a, int b) {
            const Fraction& sa = p.variables[static_cast<std::size_t>(a)].score;
            const Fraction& sb = p.variables[static_cast<std::size_t>(b)].score;
            if (sa != sb) return sa > sb;
            return a < b;
        });
    }

    bool var_blocked(int var) const {
        for (int row : var_rows[static_cast<std::size_t>(var)]) {
            if (row_used[static_cast<std::size_t>(row)] > 0) return true;
        }
        return false;
    }

    // Upper bound for completing from position k: each still-placeable
    // variable is relaxed to only its first row, rows keep capacity 1, so
    // the per-first-row score maxima sum over-estimates any completion.
    Fraction bound_from(std::size_t k) {
        Fraction bound = current;
        ++stamp;
        for (std::size_t i = k; i < order.size(); ++i) {
            const int var = order[i];
            if (var_blocked(var)) continue;
            const int bucket = var_rows[static_cast<std::size_t>(var)][0];
            const Fraction& score =
                problem.variables[static_cast<std::size_t>(var)].score;
            auto& seen = bucket_stamp[static_cast<std::size_t>(bucket)];
            auto& best = bucket_best[static_cast<std::size_t>(bucket)];
            if (seen != stamp) {
                seen = stamp;
                best = &score;
                bound += score;
            } else if (score > *best) {
                bound += score - *best;
                best = &score;
            }
        }
        return bound;
    }

    void offer_leaf() {
        std::vector<int> sorted = chosen;
        std::sort(sorted.begin(), sorted.end());
        if (current > best_objective ||
            (current == best_objective && lex_less(sorted, best_chosen))) {
            best_objective = current;
            best_chosen = std::move(sorted);
        }
    }

    void dfs(std::size_t k) {
        ++nodes;
        if (k == order.size()) {
            offer_leaf();
            return;
        }
        // Equal bounds must still be explored: an equal-objective solution
        // with a lexicographically smaller index set may remain below.
        if (bound_from(k) < best_objective) return;
        const int var = order[k];
        if (!var_blocked(var)) {
            for (int row : var_rows[static_cast<std::size_t>(var)]) {
                ++row_used[static_cast<std::size_t>(row)];
            }
            chosen.push_back(var);
            current += problem.variables[static_cast<std::size_t>(var)].score;
            dfs(k + 1);
            current -= problem.variables[static_cast<std::size_t>(var)].score;
            chosen.pop_back();
            for (int row : var_rows[static_cast<std::size_t>(var)]) {
                --row_used[static_cast<std::size_t>(row)];
            }
        }
        dfs(k + 1);
    }
};

}  // namespace

std::pair<MatchSolution, SolverStats> solve_exact(const MatchProblem& p) {
    const auto start = std::chrono::steady_clock::now();
    ExactSearch search(p);
    SolverStats stats;
    stats.best_bound = search.bound_from(0);
    search.dfs(0);
    stats.nodes_explored = search.nodes;
    stats.elapsed = std::chrono::steady_clock::now() - start;
    MatchSolution solution;
    solution.chosen = std::move(search.best_chosen);
    solution.objective = std::move(search.best_objective);
    return {std::move(solution), std::move(stats)};
}

MatchSolution solve_bruteforce(const MatchProblem& p) {
    if (p.variable_count() > kBruteforceVariableCap) {
        throw TooLargeError("bruteforce oracle capped at " +
                            std::to_string(kBruteforceVariableCap) +
                            " variables, got " +
                            std::to_string(p.variable_count()));
    }
    const auto var_rows = rows_per_variable(p);
    std::vector<int> row_used(p.rows.size(), 0);
    std::vector<int> chosen;
    Fraction current;
    MatchSolution best;  // empty set is always feasible

    auto enumerate = [&](auto&& self, int var) -> void {
        if (var == p.variable_count()) {
            if (current > best.objective ||
                (current == best.objective && lex_less(chosen, best.chosen))) {
                best.objective = current;
                best.chosen = chosen;
            }
            return;
        }
        bool free = true;
        for (int row : var_rows[static_cast<std::size_t>(var)]) {
            if (row_used[static_cast<std::size_t>(row)] > 0) {
                free = false;
                break;
            }
        }
        if (free) {
            for (int row : var_rows[static_cast<std::size_t>(var)]) {
                ++row_used[static_cast<std::size_t>(row)];
            }
            chosen.push_back(var);
            current += p.variables[static_cast<std::size_t>(var)].score;
            self(self, var + 1);
            current -= p.variables[static_cast<std::size_t>(var)].score;
            chosen.pop_back();
            for (int row : var_rows[static_cast<std::size_t>(var)]) {
                --row_used[static_cast<std::size_t>(row)];
            }
        }
        self(self, var + 1);
    };
    enumerate(enumerate, 0);
    return best;
}

bool check_feasible(const MatchProblem& p, const MatchSolution& s) {
    std::vector<char> selected(p.variables.size(), 0);
    for (int var : s.chosen) {
        if (var < 0 || var >= p.variable_count()) {
            throw IndexError("chosen variable out of range: " +
                             std::to_string(var));
        }
        selected[static_cast<std::size_t>(var)] = 1;
    }
    for (const std::vector<int>& row : p.rows) {
        int used = 0;
        for (int var : row) {
            if (var < 0 || var >= p.variable_count()) {
                throw IndexError("row variable out of range: " +
                                 std::to_string(var));
            }
            if (selected[static_cast<std::size_t>(var)]) ++used;
        }
        if (used > 1) return false;
    }
    return true;
}

}  // namespace hemd
