#ifndef PROGPOLY_GENERATOR_HPP
#define PROGPOLY_GENERATOR_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "progpoly/constraints.hpp"
#include "progpoly/lp.hpp"

namespace progpoly {

struct GeneratorConfig {
    FunctionId function = FunctionId::Log2;
    std::vector<LadderRung> ladder;  // initial term counts, ascending bitwidth
    int k_max = 8;                   // escalation cap for the largest rung
    int sample_size_factor = 6;      // |S| = factor * k^2
    int max_iterations = 1000;       // sampling budget per attempt
    int special_case_limit = 4;      // per sub-domain
    int max_subdomains = 4;          // 1, 2, or 4
    std::uint64_t rng_seed = 1;
    int interval_restriction_retries = 8;
};

struct SubdomainPoly {
    double lo = 0, hi = 0;  // [lo, hi); the outermost bounds are infinite
    std::vector<double> coefficients;
};

struct SpecialCase {
    int rung = 0;
    std::uint64_t encoding = 0;  // input encoding in the rung's format
    double value = 0;            // oracle value in the rung's interval format
};

struct ProgressivePolynomial {
    FunctionId function = FunctionId::Log2;
    std::vector<LadderRung> ladder;  // final term counts
    int k_max = 1;
    std::vector<int> exponents;  // monomial schedule; dense
    std::vector<double> split_points;
    std::vector<SubdomainPoly> subdomains;
    std::vector<SpecialCase> special_cases;
};

struct IterationTrace {
    int iteration = 0;
    bool lucky = false;
    bool sample_infeasible = false;
    std::uint64_t violated_count = 0;
    std::uint64_t violated_weight = 0;
    std::uint64_t satisfied_weight = 0;
};

struct GenerationReport {
    bool success = false;
    int iterations_used = 0;
    int lucky_count = 0;
    std::uint64_t final_violated = 0;
    std::vector<std::uint64_t> violated_per_subdomain;
    double wall_seconds = 0;
    std::vector<IterationTrace> trace;
    std::vector<std::string> attempts;
    std::string failure_reason;
};

/// A-Res weighted sampling without replacement: per item draw u in (0,1),
/// key = u^(1/w), keep the `size` largest keys.
std::vector<std::uint32_t> weighted_random_sample(const ConstraintSet& cs,
                                                  std::size_t size,
                                                  std::mt19937_64& rng);

/// Uniform variate in (0,1) from the named generator; deterministic across
/// platforms (no distribution library involved).
double unit_uniform(std::mt19937_64& rng);

struct SolveSampleResult {
    bool candidate_valid = false;
    bool proof_infeasible = false;  // exact LP rejected the untightened sample
    bool lucky = false;
    std::uint64_t n_v = 0, w_v = 0, w_s = 0;
    std::vector<double> coefficients;
    std::vector<std::uint32_t> violated;  // indices into the scanned items
};

/// Solves one sample exactly, re-validates the rounded coefficients in
/// binary64 with per-row interval restriction, then scans the whole set and
/// applies the lucky-iteration weight doubling.
SolveSampleResult solve_sample(const std::vector<std::uint32_t>& sample,
                               std::vector<IntervalConstraint>& items, int k_max,
                               int restriction_retries);

struct CoreResult {
    bool success = false;
    bool proof_infeasible = false;
    std::vector<double> coefficients;
    std::vector<std::uint32_t> violated;
    int iterations = 0;
    int lucky = 0;
};

/// The bare sampling loop over an already-built constraint vector; also the
/// entry point for the synthetic convergence benches.
CoreResult run_sampling_loop(std::vector<IntervalConstraint>& items, int k_max,
                             const GeneratorConfig& cfg, std::mt19937_64& rng,
                             std::vector<IterationTrace>* trace);

std::pair<ProgressivePolynomial, GenerationReport> generate(const GeneratorConfig& cfg);

/// Adds every originating (input, format) pair of the violated constraints
/// to the special-case table, skipping pairs the runtime serves structurally.
void accept_special_cases(ProgressivePolynomial& poly, const ConstraintSet& cs,
                          const std::vector<const IntervalConstraint*>& violated);

}  // namespace progpoly

#endif
