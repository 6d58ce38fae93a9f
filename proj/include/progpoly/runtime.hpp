#ifndef PROGPOLY_RUNTIME_HPP
#define PROGPOLY_RUNTIME_HPP

#include <span>
#include <string>

#include "progpoly/generator.hpp"

namespace progpoly {

/// Plain dense Horner over the first `terms` coefficients, one binary64
/// rounding per step, no fused multiply-add.
double horner_eval(std::span<const double> coeffs, int terms, double x);

/// A generated function ready for evaluation: the polynomial plus lookup
/// structures for the special-case table.
struct CompiledFunction {
    ProgressivePolynomial poly;
    std::vector<std::pair<std::uint64_t, double>> special_lookup;  // (rung<<32|enc, value)

    int rung_for(FpFormat out) const;          // smallest rung covering out
    int terms_for(FpFormat out) const;
    bool operator==(const CompiledFunction& o) const;
};

CompiledFunction compile(ProgressivePolynomial poly);

/// Inputs the evaluator serves with exact arithmetic before touching the
/// polynomial: log-family x=1, log2 on exact powers of two, exp2 on integer
/// inputs, exp10 on small nonnegative integers.
bool structurally_covered(FunctionId f, FpFormat fmt, std::uint64_t encoding);

/// Full evaluation pipeline: special values, saturation, structural paths,
/// special-case table, then reduce / select / Horner / compensate / round.
FpValue evaluate(const CompiledFunction& cf, FpValue x, FpFormat out, RoundingMode mode);

/// Dense-Horner multiply-add count when evaluating for `out`.
int multiply_add_count(const CompiledFunction& cf, FpFormat out);

/// Canonical versioned JSON with hex-encoded binary64 fields and a checksum.
std::string export_json(const CompiledFunction& cf);
CompiledFunction load_json(const std::string& text);

/// A portable source file with the coefficient table and the Horner kernel.
std::string emit_source(const CompiledFunction& cf);

}  // namespace progpoly

#endif
