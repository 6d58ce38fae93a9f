#include "progpoly/validator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>

namespace progpoly {

namespace {

// Expected outputs for one (function, format, mode), via the cache when
// available, recomputed and stored otherwise.
std::vector<std::uint64_t> expected_table(FunctionId f, FpFormat fmt, RoundingMode mode,
                                          const std::string& cache_dir) {
    std::string path;
    if (!cache_dir.empty()) {
        path = cache_dir + "/" + oracle_cache_filename(f, fmt, mode);
        if (auto cached = read_oracle_cache(path, f, fmt, mode)) return std::move(*cached);
    }
    std::vector<std::uint64_t> out;
    out.reserve(fmt.encoding_count_minus_one() + 1);
    oracle_table(f, fmt, mode, [&](FpValue, OracleResult r) { out.push_back(r.value.bits); });
    if (!path.empty()) {
        std::filesystem::create_directories(cache_dir);
        write_oracle_cache(path, f, fmt, mode, out);
    }
    return out;
}

}  // namespace

ConformanceReport check_exhaustive(const CompiledFunction& cf, FpFormat fmt,
                                   std::span<const RoundingMode> modes,
                                   const std::string& cache_dir) {
    ConformanceReport rep;
    rep.function = cf.poly.function;
    rep.format = fmt;
    rep.modes.assign(modes.begin(), modes.end());

    if (!cache_dir.empty()) {
        // Tables per mode (reusable across runs), then one evaluation pass.
        std::vector<std::vector<std::uint64_t>> tables;
        for (RoundingMode m : modes)
            tables.push_back(expected_table(cf.poly.function, fmt, m, cache_dir));
        enumerate(fmt, [&](FpValue x) {
            for (std::size_t mi = 0; mi < modes.size(); ++mi) {
                const std::uint64_t want = tables[mi][x.bits];
                const std::uint64_t got = evaluate(cf, x, fmt, modes[mi]).bits;
                ++rep.total_checked;
                if (got != want) {
                    ++rep.mismatch_count;
                    if (rep.mismatches.size() < kMismatchListCap)
                        rep.mismatches.push_back({x.bits, got, want, modes[mi]});
                }
            }
        });
        return rep;
    }

    // No cache: one bracket evaluation serves all modes of an input.
    enumerate(fmt, [&](FpValue x) {
        for (std::size_t mi = 0; mi < modes.size(); ++mi) ++rep.total_checked;
        std::vector<std::uint64_t> want(modes.size());
        bool have_special = false;
        if (auto sp = special_value_result(cf.poly.function, x, fmt, modes[0])) {
            have_special = true;
            for (std::size_t mi = 0; mi < modes.size(); ++mi)
                want[mi] = special_value_result(cf.poly.function, x, fmt, modes[mi])->bits;
        }
        if (!have_special) {
            const auto outs = oracle_round_many(cf.poly.function, x, fmt, modes);
            for (std::size_t mi = 0; mi < modes.size(); ++mi)
                want[mi] = outs[mi].result.value.bits;
        }
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
            const std::uint64_t got = evaluate(cf, x, fmt, modes[mi]).bits;
            if (got != want[mi]) {
                ++rep.mismatch_count;
                if (rep.mismatches.size() < kMismatchListCap)
                    rep.mismatches.push_back({x.bits, got, want[mi], modes[mi]});
            }
        }
    });
    return rep;
}

std::vector<ConformanceReport> check_progressive(const CompiledFunction& cf,
                                                 const std::string& cache_dir) {
    // Structural: term counts nondecreasing, strictly fewer wherever the
    // generator reported distinct counts (they are the ladder itself).
    int prev = 0;
    for (const auto& r : cf.poly.ladder) {
        if (r.term_count < prev)
            throw std::logic_error("check_progressive: term counts decrease");
        prev = r.term_count;
    }
    std::vector<ConformanceReport> reports;
    for (const auto& r : cf.poly.ladder)
        reports.push_back(check_exhaustive(cf, r.format, kIeeeModes, cache_dir));
    return reports;
}

std::vector<ConformanceReport> check_sweep(const CompiledFunction& cf,
                                           const std::string& cache_dir) {
    std::vector<ConformanceReport> reports;
    const FpFormat largest = cf.poly.ladder.back().format;
    const int e = largest.exponent_bits;
    for (int k = e + 2; k <= largest.total_bits; ++k)
        reports.push_back(
            check_exhaustive(cf, FpFormat::make(k, e), kIeeeModes, cache_dir));
    return reports;
}

std::vector<IntervalConstraint> synthetic_fullrank(int k, std::uint64_t n,
                                                   std::mt19937_64& rng,
                                                   int width_exponent) {
    // A known dyadic polynomial sampled at dyadic points in [-1, 1]; the
    // intervals are centered on exact values, so the system is feasible and
    // carries k independent rows with overwhelming probability.
    std::vector<ExactReal> coeffs;
    for (int j = 0; j < k; ++j) {
        const long m = static_cast<long>(rng() & ((1L << 20) - 1)) - (1L << 19);
        coeffs.push_back(ExactReal(m).mul_pow2(-19));
    }
    const ExactReal delta = ExactReal::pow2(width_exponent);
    std::vector<IntervalConstraint> items;
    items.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const long m = static_cast<long>(rng() & ((1L << 21) - 1)) - (1L << 20);
        const ExactReal x = ExactReal(m).mul_pow2(-20);
        ExactReal p(0L);
        for (int j = k - 1; j >= 0; --j) p = p * x + coeffs[static_cast<std::size_t>(j)];
        IntervalConstraint c;
        c.x = round_to_binary64(x);  // dyadic with 21 bits: exact
        const FpValue lo64 =
            round_exact(p - delta, FpFormat::binary64(), RoundingMode::TowardPositive);
        const FpValue hi64 =
            round_exact(p + delta, FpFormat::binary64(), RoundingMode::TowardNegative);
        c.lo = std::bit_cast<double>(lo64.bits);
        c.hi = std::bit_cast<double>(hi64.bits);
        c.term_count = k;
        c.weight = 1;
        items.push_back(std::move(c));
    }
    return items;
}

ConvergenceStats convergence_bench(const ConvergenceSpec& spec, std::uint64_t base_seed) {
    ConvergenceStats st;
    st.k = spec.k;
    st.n = spec.n;
    st.seeds = spec.seeds;
    st.bound = 6.0 * spec.k * std::log(static_cast<double>(spec.n));
    GeneratorConfig cfg;
    cfg.sample_size_factor = spec.sample_size_factor;
    cfg.max_iterations = spec.max_iterations;
    cfg.special_case_limit = 0;  // accept only a fully satisfying polynomial
    for (int s = 0; s < spec.seeds; ++s) {
        std::mt19937_64 rng(base_seed + static_cast<std::uint64_t>(s) * 0x9E3779B97F4A7C15ULL);
        auto items = synthetic_fullrank(spec.k, spec.n, rng);
        const CoreResult r = run_sampling_loop(items, spec.k, cfg, rng, nullptr);
        st.iterations_total += static_cast<std::uint64_t>(r.iterations);
        st.lucky_total += static_cast<std::uint64_t>(r.lucky);
        if (r.success) {
            ++st.successes;
            st.iterations_per_seed.push_back(r.iterations);
        }
    }
    if (!st.iterations_per_seed.empty()) {
        std::vector<int> sorted = st.iterations_per_seed;
        std::sort(sorted.begin(), sorted.end());
        st.median_iterations = sorted[sorted.size() / 2];
    }
    return st;
}

}  // namespace progpoly
