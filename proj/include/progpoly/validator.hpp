#ifndef PROGPOLY_VALIDATOR_HPP
#define PROGPOLY_VALIDATOR_HPP

#include <span>
#include <string>
#include <vector>

#include "progpoly/runtime.hpp"

namespace progpoly {

inline constexpr std::size_t kMismatchListCap = 100;

struct Mismatch {
    std::uint64_t input = 0;
    std::uint64_t got = 0;
    std::uint64_t expected = 0;
    RoundingMode mode = RoundingMode::NearestEven;
};

struct ConformanceReport {
    FunctionId function = FunctionId::Log2;
    FpFormat format;
    std::vector<RoundingMode> modes;
    std::uint64_t total_checked = 0;  // (input, mode) pairs
    std::uint64_t mismatch_count = 0;
    std::vector<Mismatch> mismatches;  // capped; the count stays exact
    bool pass() const { return mismatch_count == 0; }
};

/// Compares evaluate() against the oracle for every encoding of fmt under
/// every requested mode, specials included. With a cache directory, oracle
/// tables are reused across runs keyed by (function, format, mode, version).
ConformanceReport check_exhaustive(const CompiledFunction& cf, FpFormat fmt,
                                   std::span<const RoundingMode> modes,
                                   const std::string& cache_dir = "");

/// Exhaustive checks at each rung's own format (hence its truncated term
/// count), plus the structural progressive assertions.
std::vector<ConformanceReport> check_progressive(const CompiledFunction& cf,
                                                 const std::string& cache_dir = "");

/// The n+2/round-to-odd theorem sweep: every F(k, |E|) between the exponent
/// floor and the largest rung, all five IEEE modes.
std::vector<ConformanceReport> check_sweep(const CompiledFunction& cf,
                                           const std::string& cache_dir = "");

struct ConvergenceSpec {
    int k = 4;
    std::uint64_t n = 100000;
    int seeds = 20;
    int max_iterations = 4000;
    int sample_size_factor = 6;
};

struct ConvergenceStats {
    int k = 0;
    std::uint64_t n = 0;
    int seeds = 0;
    int successes = 0;
    std::vector<int> iterations_per_seed;
    double median_iterations = 0;
    double bound = 0;  // 6 k ln n
    std::uint64_t lucky_total = 0;
    std::uint64_t iterations_total = 0;
};

/// Full-rank synthetic systems around a known polynomial: success rate,
/// iteration quantiles against 6 k ln n, and the lucky-iteration frequency.
ConvergenceStats convergence_bench(const ConvergenceSpec& spec, std::uint64_t base_seed);

/// Synthetic constraint builder shared with the tests.
std::vector<IntervalConstraint> synthetic_fullrank(int k, std::uint64_t n,
                                                   std::mt19937_64& rng,
                                                   int width_exponent = -30);

}  // namespace progpoly

#endif
