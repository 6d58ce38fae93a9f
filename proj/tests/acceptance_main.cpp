// Acceptance suite: one line per criterion, exit nonzero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "progpoly/validator.hpp"

using namespace progpoly;

namespace {

int g_failures = 0;

void verdict(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1
// Double rounding through round-to-odd at 21 bits: for every k with
// 9 < k <= 19 and all five IEEE modes, rounding x directly into F(k,8)
// equals rounding the 21-bit round-to-odd value of x.
void criterion_ro_theorem() {
    const auto t0 = std::chrono::steady_clock::now();
    const int E = 8, n = 19;
    const FpFormat wide = FpFormat::make(n + 2, E);
    std::vector<FpFormat> targets;
    for (int k = 10; k <= n; ++k) targets.push_back(FpFormat::make(k, E));

    std::uint64_t failures = 0, checked = 0;
    auto test_all_k = [&](const ExactReal& x) {
        const ExactReal via = decode(round_exact(x, wide, RoundingMode::ToOdd));
        for (const FpFormat& tgt : targets) {
            for (RoundingMode m : kIeeeModes) {
                const FpValue direct = round_exact(x, tgt, m);
                const FpValue hopped = round_exact(via, tgt, m);
                ++checked;
                if (direct.bits != hopped.bits) ++failures;
            }
        }
    };

    // 10^6 random rationals spread over the dynamic range, each against
    // every target width.
    std::mt19937_64 rng(20240701);
    for (int i = 0; i < 1000000; ++i) {
        const long num = static_cast<long>(rng() % (1L << 24)) + 1;
        const long den = static_cast<long>(rng() % (1L << 12)) + 1;
        const int sc = static_cast<int>(rng() % 301) - 150;
        ExactReal x = ExactReal(mpz_class(num), mpz_class(den)).mul_pow2(sc);
        if (rng() & 1) x = -x;
        test_all_k(x);
    }
    // Every representable boundary and every midpoint of each target format,
    // each against every width.
    for (const FpFormat& tgt : targets) {
        ExactReal prev;
        bool have_prev = false;
        enumerate(tgt, [&](FpValue v) {
            if (!v.is_finite() || v.sign()) return;
            const ExactReal val = decode(v);
            test_all_k(val);
            test_all_k(-val);
            if (have_prev && val > prev) {
                const ExactReal mid = (prev + val).mul_pow2(-1);
                test_all_k(mid);
                test_all_k(-mid);
            }
            prev = val;
            have_prev = true;
        });
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "ro@21 double-rounding: %llu checks, %llu failures, %.0fs (limit 300)",
                  static_cast<unsigned long long>(checked),
                  static_cast<unsigned long long>(failures), secs);
    verdict(1, failures == 0 && secs <= 300.0, buf);
}

// ------------------------------------------------------- criteria 2, 3 and 4
struct GeneratedFunction {
    bool ok = false;
    CompiledFunction cf;
    GenerationReport report;
    double gen_seconds = 0;
};

GeneratedFunction run_generation(FunctionId f, int max_subdomains, int special_limit,
                                 std::uint64_t seed) {
    GeneratedFunction out;
    GeneratorConfig cfg;
    cfg.function = f;
    cfg.ladder = {LadderRung::ro_rung(FpFormat::bfloat16(), 2),
                  LadderRung::ro_rung(FpFormat::tensorfloat32(), 4)};
    cfg.k_max = 8;
    cfg.max_iterations = 1000;
    cfg.special_case_limit = special_limit;
    cfg.max_subdomains = max_subdomains;
    cfg.rng_seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    auto [poly, rep] = generate(cfg);
    out.gen_seconds = seconds_since(t0);
    out.report = rep;
    if (!rep.success) return out;
    out.cf = compile(std::move(poly));
    out.ok = true;
    return out;
}

void criterion_generation(int criterion, FunctionId f, int max_subdomains,
                          int special_limit, std::uint64_t max_violated_per_subdomain,
                          GeneratedFunction& out) {
    out = run_generation(f, max_subdomains, special_limit, 42);
    char buf[256];
    if (!out.ok) {
        std::snprintf(buf, sizeof buf, "%s generation failed: %s", to_string(f),
                      out.report.failure_reason.c_str());
        verdict(criterion, false, buf);
        return;
    }
    const int k3 = out.cf.poly.ladder.front().term_count;
    const int k1 = out.cf.poly.ladder.back().term_count;
    bool ok = k3 < k1 && k1 <= 8;
    for (std::uint64_t v : out.report.violated_per_subdomain)
        ok = ok && v <= max_violated_per_subdomain;

    std::string detail;
    std::snprintf(buf, sizeof buf,
                  "%s K3=%d K1=%d subdomains=%zu specials=%zu gen=%.0fs/1800 ",
                  to_string(f), k3, k1, out.cf.poly.subdomains.size(),
                  out.cf.poly.special_cases.size(), out.gen_seconds);
    detail = buf;

    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t mismatches = 0;
    for (const auto& rung : out.cf.poly.ladder) {
        const auto rep = check_exhaustive(out.cf, rung.format, kIeeeModes);
        ok = ok && rep.pass();
        mismatches += rep.mismatch_count;
    }
    for (const auto& rep : check_sweep(out.cf)) {
        ok = ok && rep.pass();
        mismatches += rep.mismatch_count;
    }
    const double val_secs = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "exhaustive+sweep mismatches=%llu val=%.0fs/600",
                  static_cast<unsigned long long>(mismatches), val_secs);
    detail += buf;
    ok = ok && out.gen_seconds <= 1800.0 && val_secs <= 600.0;
    verdict(criterion, ok, detail);
}

void criterion_progressive_cost(const GeneratedFunction* gens, int count) {
    bool ok = true;
    std::string detail;
    for (int i = 0; i < count; ++i) {
        if (!gens[i].ok) {
            ok = false;
            continue;
        }
        const CompiledFunction& cf = gens[i].cf;
        // prefix sharing is structural: one coefficient vector per sub-domain
        // serves every rung through truncation; cost strictly drops with K3<K1
        const int macs_small = multiply_add_count(cf, cf.poly.ladder.front().format);
        const int macs_large = multiply_add_count(cf, cf.poly.ladder.back().format);
        const int k3 = cf.poly.ladder.front().term_count;
        const int k1 = cf.poly.ladder.back().term_count;
        if (k3 < k1 && !(macs_small < macs_large)) ok = false;
        for (const auto& sd : cf.poly.subdomains)
            if (static_cast<int>(sd.coefficients.size()) != cf.poly.k_max) ok = false;
        char buf[80];
        std::snprintf(buf, sizeof buf, "%s macs %d<%d; ", to_string(cf.poly.function),
                      macs_small, macs_large);
        detail += buf;
    }
    verdict(4, ok, detail + "prefix sharing structural");
}

// ---------------------------------------------------------------- criterion 5
void criterion_clarkson() {
    bool ok = true;
    std::string detail;
    std::uint64_t lucky = 0, iters = 0;
    for (int k : {3, 4, 6}) {
        for (std::uint64_t n : {10000ULL, 100000ULL}) {
            ConvergenceSpec spec;
            spec.k = k;
            spec.n = n;
            spec.seeds = 20;
            spec.max_iterations = 4000;
            const ConvergenceStats st = convergence_bench(spec, 777);
            lucky += st.lucky_total;
            iters += st.iterations_total;
            const bool pass =
                st.successes == spec.seeds && st.median_iterations <= st.bound;
            ok = ok && pass;
            char buf[120];
            std::snprintf(buf, sizeof buf, "k=%d n=%llu: %d/20 med %.0f<=%.0f; ", k,
                          static_cast<unsigned long long>(n), st.successes,
                          st.median_iterations, st.bound);
            detail += buf;
        }
    }
    const double frac = iters ? static_cast<double>(lucky) / static_cast<double>(iters) : 0;
    const double sigma = std::sqrt(0.25 / static_cast<double>(iters ? iters : 1));
    const bool lucky_ok = frac >= 0.5 - 3 * sigma;
    char buf[80];
    std::snprintf(buf, sizeof buf, "lucky %.3f >= %.3f", frac, 0.5 - 3 * sigma);
    verdict(5, ok && lucky_ok, detail + buf);
}

// ---------------------------------------------------------------- criterion 6
void criterion_sampling_law() {
    ConstraintSet cs;
    cs.items.push_back(IntervalConstraint{0.0, 0, 1, 1, 2, {}});
    cs.items.push_back(IntervalConstraint{1.0, 0, 1, 1, 1, {}});
    std::mt19937_64 rng(31337);
    const int trials = 10000;
    int wins = 0;
    for (int t = 0; t < trials; ++t)
        if (weighted_random_sample(cs, 1, rng)[0] == 0) ++wins;
    const double p = static_cast<double>(wins) / trials;
    const double sigma = std::sqrt((2.0 / 3) * (1.0 / 3) / trials);
    char buf[100];
    std::snprintf(buf, sizeof buf, "P(select w=2) = %.4f, want 2/3 +- %.4f", p, 3 * sigma);
    verdict(6, std::abs(p - 2.0 / 3) <= 3 * sigma, buf);
}

// ---------------------------------------------------------------- criterion 7
void criterion_lp_oracle() {
    std::mt19937_64 rng(2718281);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 6);
        std::vector<mpq_class> xs, vals;
        std::vector<long> used;
        while (static_cast<int>(xs.size()) < k) {
            const long num = static_cast<long>(rng() % 1024) - 512;
            bool dup = false;
            for (long u : used) dup = dup || u == num;
            if (dup) continue;
            used.push_back(num);
            mpq_class x(num, 256), v(static_cast<long>(rng() % 4096) - 2048, 128);
            x.canonicalize();
            v.canonicalize();
            xs.push_back(x);
            vals.push_back(v);
        }
        LpProblem p;
        p.unknowns = k;
        for (int i = 0; i < k; ++i) {
            LpRow r;
            r.x = ExactReal(xs[static_cast<std::size_t>(i)]);
            r.term_count = k;
            r.lower = ExactReal(vals[static_cast<std::size_t>(i)]);
            r.upper = r.lower;
            p.rows.push_back(std::move(r));
        }
        const LpSolution s = lp_solve(p);
        if (s.status != LpSolution::Status::Feasible) {
            ++bad;
            continue;
        }
        // exact Gaussian elimination oracle
        const std::size_t ks = static_cast<std::size_t>(k);
        std::vector<std::vector<mpq_class>> m(ks, std::vector<mpq_class>(ks + 1));
        for (std::size_t r = 0; r < ks; ++r) {
            mpq_class pw = 1;
            for (std::size_t c = 0; c < ks; ++c) {
                m[r][c] = pw;
                pw *= xs[r];
            }
            m[r][ks] = vals[r];
        }
        bool singular = false;
        for (std::size_t col = 0; col < ks && !singular; ++col) {
            std::size_t piv = col;
            while (piv < ks && m[piv][col] == 0) ++piv;
            if (piv == ks) {
                singular = true;
                break;
            }
            std::swap(m[piv], m[col]);
            for (std::size_t r = 0; r < ks; ++r) {
                if (r == col || m[r][col] == 0) continue;
                const mpq_class fct = m[r][col] / m[col][col];
                for (std::size_t c = col; c <= ks; ++c) m[r][c] -= fct * m[col][c];
            }
        }
        if (singular) {
            ++bad;
            continue;
        }
        for (std::size_t i = 0; i < ks; ++i) {
            const mpq_class want = m[i][ks] / m[i][i];
            if (s.coefficients[i].rational() != want) ++bad;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "100 zero-width instances, %d disagreements", bad);
    verdict(7, bad == 0, buf);
}

// ---------------------------------------------------------------- criterion 8
void criterion_determinism() {
    GeneratorConfig cfg;
    cfg.function = FunctionId::Log2;
    cfg.ladder = {LadderRung::ro_rung(FpFormat::make(10, 8), 1),
                  LadderRung::ro_rung(FpFormat::make(12, 8), 2)};
    cfg.k_max = 6;
    cfg.max_iterations = 400;
    cfg.rng_seed = 777;
    auto [p1, r1] = generate(cfg);
    auto [p2, r2] = generate(cfg);
    bool ok = r1.success && r2.success;
    std::string a, b;
    if (ok) {
        a = export_json(compile(std::move(p1)));
        b = export_json(compile(std::move(p2)));
        ok = a == b;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "two gen runs, identical config+seed: %s (%zu bytes)",
                  ok ? "byte-identical" : "DIFFER", a.size());
    verdict(8, ok, buf);
}

// ---------------------------------------------------------------- criterion 9
void criterion_storage(const GeneratedFunction& log2_gen) {
    if (!log2_gen.ok) {
        verdict(9, false, "log2 artifact unavailable");
        return;
    }
    const std::string artifact = export_json(log2_gen.cf);
    char buf[96];
    std::snprintf(buf, sizeof buf, "log2 artifact: %zu bytes (budget 1024), %zu subdomains",
                  artifact.size(), log2_gen.cf.poly.subdomains.size());
    verdict(9, artifact.size() <= 1024, buf);
}

}  // namespace

int main() {
    criterion_ro_theorem();

    GeneratedFunction gens[3];
    // log2 and exp2 are full-rank systems: demand a perfect polynomial.
    criterion_generation(2, FunctionId::Log2, 2, /*special_limit=*/1,
                         /*max_violated=*/0, gens[0]);
    criterion_generation(3, FunctionId::Exp2, 2, /*special_limit=*/1,
                         /*max_violated=*/0, gens[1]);
    criterion_generation(3, FunctionId::Ln, 4, /*special_limit=*/4,
                         /*max_violated=*/4, gens[2]);
    criterion_progressive_cost(gens, 3);
    criterion_clarkson();
    criterion_sampling_law();
    criterion_lp_oracle();
    criterion_determinism();
    criterion_storage(gens[0]);

    std::printf("%s (%d failing)\n", g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
