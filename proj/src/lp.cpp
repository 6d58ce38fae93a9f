#include "progpoly/lp.hpp"

#include <cmath>
#include <stdexcept>

#include "progpoly/formats.hpp"

namespace progpoly {

namespace {

// Coefficients live well inside this box for every kernel this tool
// generates; it pins the lexicographic optimum even on rank-deficient
// samples, where a coordinate would otherwise be unbounded below. The box
// also caps the coefficient magnitudes a sample optimum can reach, which
// keeps binary64 re-validation noise far below the narrowest intervals.
const long kBoxExponent = 16;

struct DualRow {
    std::vector<mpq_class> a;  // length k
    mpq_class b;
};

// max b^T y  s.t.  sum_r y_r * a_r = c(eps), y >= 0, where c(eps) encodes the
// lexicographic objective. The box rows supply a trivially feasible identity
// start, so the feasibility phase collapses; infeasibility of the original
// rows surfaces as an unbounded dual ray.
class DualSimplex {
  public:
    DualSimplex(std::vector<DualRow> rows, int k) : rows_(std::move(rows)), k_(k) {
        const std::size_t m = rows_.size();
        ad_.resize(m);
        bd_.resize(m);
        for (std::size_t r = 0; r < m; ++r) {
            ad_[r].resize(k_);
            for (int i = 0; i < k_; ++i) ad_[r][i] = rows_[r].a[i].get_d();
            bd_[r] = rows_[r].b.get_d();
        }
        // Initial basis: the +e_j box rows (the last 2k rows are the box,
        // ordered +e_1, -e_1, +e_2, -e_2, ...).
        basis_.resize(k_);
        y_.assign(k_, std::vector<mpq_class>(k_, 0));
        for (int i = 0; i < k_; ++i) {
            basis_[i] = m - 2 * static_cast<std::size_t>(k_) + 2 * i;
            y_[i][i] = 1;  // B^-1 = I
        }
    }

    // Returns true when optimal, false when the dual is unbounded (primal
    // infeasible). On success `primal` holds the lexicographic minimizer.
    bool run(std::vector<mpq_class>& primal) {
        for (;;) {
            compute_u();
            const long enter = price();
            if (enter < 0) {
                primal = u_;
                return true;
            }
            std::vector<mpq_class> w = direction(static_cast<std::size_t>(enter));
            const int leave = ratio_test(w);
            if (leave < 0) return false;
            pivot(static_cast<std::size_t>(enter), leave, w);
        }
    }

  private:
    void compute_u() {
        u_.assign(k_, 0);
        for (int i = 0; i < k_; ++i) {
            const mpq_class& bi = rows_[basis_[i]].b;
            if (bi == 0) continue;
            for (int p = 0; p < k_; ++p)
                if (y_[i][p] != 0) u_[p] += bi * y_[i][p];
        }
        for (int p = 0; p < k_; ++p) ud_[p] = u_[p].get_d();
    }

    // Bland: the least row index with a provably positive reduced cost.
    // A double screen skips rows that are provably nonpositive; anything
    // ambiguous is decided exactly.
    long price() {
        const std::size_t m = rows_.size();
        for (std::size_t r = 0; r < m; ++r) {
            if (in_basis(r)) continue;
            double dot = bd_[r];
            double mag = std::abs(bd_[r]);
            const auto& arow = ad_[r];
            for (int i = 0; i < k_; ++i) {
                const double p = ud_[i] * arow[i];
                dot -= p;
                mag += std::abs(p);
            }
            if (dot < -(mag * 0x1p-40 + 0x1p-1000)) continue;  // certainly <= 0
            mpq_class rc = rows_[r].b;
            for (int i = 0; i < k_; ++i)
                if (rows_[r].a[i] != 0) rc -= u_[i] * rows_[r].a[i];
            if (rc > 0) return static_cast<long>(r);
        }
        return -1;
    }

    bool in_basis(std::size_t r) const {
        for (int i = 0; i < k_; ++i)
            if (basis_[i] == r) return true;
        return false;
    }

    std::vector<mpq_class> direction(std::size_t r) const {
        std::vector<mpq_class> w(k_, 0);
        for (int i = 0; i < k_; ++i) {
            for (int p = 0; p < k_; ++p)
                if (y_[i][p] != 0 && rows_[r].a[p] != 0) w[i] += y_[i][p] * rows_[r].a[p];
        }
        return w;
    }

    // Lexicographic ratio test over rows with w_i > 0; the lex rule both
    // breaks ties deterministically and prevents cycling.
    int ratio_test(const std::vector<mpq_class>& w) const {
        int best = -1;
        for (int i = 0; i < k_; ++i) {
            if (w[i] <= 0) continue;
            if (best < 0) {
                best = i;
                continue;
            }
            // compare y_[i]/w[i] vs y_[best]/w[best] lexicographically
            for (int p = 0; p < k_; ++p) {
                const mpq_class lhs = y_[i][p] * w[best];
                const mpq_class rhs = y_[best][p] * w[i];
                if (lhs == rhs) continue;
                if (lhs < rhs) best = i;
                break;
            }
        }
        return best;
    }

    void pivot(std::size_t enter, int leave, const std::vector<mpq_class>& w) {
        const mpq_class piv = w[leave];
        for (int p = 0; p < k_; ++p) y_[leave][p] /= piv;
        for (int i = 0; i < k_; ++i) {
            if (i == leave || w[i] == 0) continue;
            for (int p = 0; p < k_; ++p)
                if (y_[leave][p] != 0) y_[i][p] -= w[i] * y_[leave][p];
        }
        basis_[leave] = enter;
    }

    std::vector<DualRow> rows_;
    int k_;
    std::vector<std::size_t> basis_;
    std::vector<std::vector<mpq_class>> y_;  // B^-1: row i is basic value i in eps powers
    std::vector<mpq_class> u_;               // primal point of the current basis
    double ud_[64] = {};
    std::vector<std::vector<double>> ad_;
    std::vector<double> bd_;
};

}  // namespace

LpSolution lp_solve(const LpProblem& p) {
    if (p.rows.empty()) throw std::invalid_argument("lp_solve: no rows");
    const int k = p.unknowns;
    if (k < 1 || k > 63) throw std::invalid_argument("lp_solve: bad unknown count");
    std::vector<int> sched = p.exponents;
    if (sched.empty())
        for (int i = 0; i < k; ++i) sched.push_back(i);
    if (static_cast<int>(sched.size()) != k)
        throw std::invalid_argument("lp_solve: schedule size mismatch");

    std::vector<DualRow> rows;
    rows.reserve(2 * p.rows.size() + 2 * static_cast<std::size_t>(k));
    for (const auto& row : p.rows) {
        if (!row.x.is_finite() || !row.lower.is_finite() || !row.upper.is_finite())
            throw std::invalid_argument("lp_solve: rows must be finite");
        if (row.term_count < 1 || row.term_count > k)
            throw std::invalid_argument("lp_solve: bad term count");
        std::vector<mpq_class> a(k, 0);
        for (int i = 0; i < row.term_count; ++i) {
            mpq_class pw;
            mpz_pow_ui(pw.get_num_mpz_t(), row.x.rational().get_num_mpz_t(),
                       static_cast<unsigned long>(sched[i]));
            mpz_pow_ui(pw.get_den_mpz_t(), row.x.rational().get_den_mpz_t(),
                       static_cast<unsigned long>(sched[i]));
            pw.canonicalize();
            a[i] = pw;
        }
        DualRow lo{a, row.lower.rational()};
        rows.push_back(std::move(lo));
        DualRow hi;
        hi.a.resize(k);
        for (int i = 0; i < k; ++i) hi.a[i] = -a[i];
        hi.b = -row.upper.rational();
        rows.push_back(std::move(hi));
    }
    const mpq_class box = mpq_class(mpz_class(1) << kBoxExponent);
    for (int j = 0; j < k; ++j) {
        DualRow plus, minus;
        plus.a.assign(k, 0);
        minus.a.assign(k, 0);
        plus.a[j] = 1;
        minus.a[j] = -1;
        plus.b = -box;
        minus.b = -box;
        rows.push_back(std::move(plus));
        rows.push_back(std::move(minus));
    }

    DualSimplex simplex(std::move(rows), k);
    std::vector<mpq_class> primal;
    LpSolution sol;
    if (!simplex.run(primal)) {
        sol.status = LpSolution::Status::Infeasible;
        return sol;
    }
    sol.status = LpSolution::Status::Feasible;
    sol.coefficients.reserve(k);
    for (const auto& q : primal) sol.coefficients.emplace_back(q);
    return sol;
}

std::vector<double> coefficients_to_binary64(const LpSolution& sol) {
    if (sol.status != LpSolution::Status::Feasible)
        throw std::logic_error("coefficients_to_binary64: infeasible solution");
    std::vector<double> out;
    out.reserve(sol.coefficients.size());
    for (const auto& c : sol.coefficients) out.push_back(round_to_binary64(c));
    return out;
}

}  // namespace progpoly
