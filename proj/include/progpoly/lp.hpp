#ifndef PROGPOLY_LP_HPP
#define PROGPOLY_LP_HPP

#include <vector>

#include "progpoly/exact_real.hpp"

namespace progpoly {

/// One two-sided row: lower <= sum_j C_j * x^(sched_j) <= upper, using the
/// first `term_count` columns of the exponent schedule.
struct LpRow {
    ExactReal x;
    int term_count = 1;
    ExactReal lower, upper;
};

struct LpProblem {
    int unknowns = 1;                // k_max coefficients C_1..C_k
    std::vector<LpRow> rows;
    std::vector<int> exponents;     // monomial schedule; empty means 0,1,2,...
};

struct LpSolution {
    enum class Status : unsigned char { Feasible, Infeasible };
    Status status = Status::Infeasible;
    std::vector<ExactReal> coefficients;  // size = unknowns when feasible
};

/// Exact rational solve: decides feasibility and, when feasible, returns the
/// lexicographic minimizer of (C_1, ..., C_k) over the feasible region
/// intersected with a wide coefficient box. Deterministic: identical
/// problems produce bit-identical solutions.
LpSolution lp_solve(const LpProblem& p);

/// Nearest-even binary64 image of the exact coefficients.
std::vector<double> coefficients_to_binary64(const LpSolution& sol);

}  // namespace progpoly

#endif
