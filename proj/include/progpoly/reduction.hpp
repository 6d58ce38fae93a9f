#ifndef PROGPOLY_REDUCTION_HPP
#define PROGPOLY_REDUCTION_HPP

#include "progpoly/exact_real.hpp"
#include "progpoly/formats.hpp"
#include "progpoly/function_id.hpp"

namespace progpoly {

/// Result of range reduction: the binary64 kernel argument plus the integer
/// reconstruction datum (binade exponent for logs, scaled integer part for
/// the exp family). The per-function scale constants are global, see below.
struct ReducedInput {
    double x_reduced = 0;
    long recon = 0;
};

/// Log family: x = m * 2^e with m in [1,2) (exact; subnormals included).
/// Exp family: x * scale = i + r with r in [-1/2, 1/2), i integer; the tie
/// x*scale = i + 1/2 resolves upward so r stays in the half-open range.
ReducedInput range_reduce(FunctionId f, double x);
ReducedInput range_reduce(FunctionId f, FpValue x);

/// Binary64 forward compensation, exactly as the runtime evaluates it:
///   log2:      y = P + e                       (one rounding)
///   ln/log10:  y = P*C + e*C                   (two-product scheme, three roundings)
///   exp family: y = P * 2^i                    (exact scaling in range)
double output_compensate(FunctionId f, double y_reduced, long recon);

/// The irrational constant behind a function's compensation / reduction,
/// held both as the nearest binary64 and as an exact rational enclosure
/// computed at 128 bits.
struct ConstantBracket {
    double nearest = 1.0;
    ExactReal lo{1L}, hi{1L};
    bool trivial = true;  // exactly 1 (log2 / exp2)
};

/// Compensation constant K: ideal output is (P+e)*K for logs, P*2^i for exps.
const ConstantBracket& compensation_constant(FunctionId f);

/// Reduction scale S for the exp family (log2(e), log2(10)); 1 for exp2/logs.
const ConstantBracket& reduction_scale(FunctionId f);

/// Exact rational inverse image of [l, h] under the real-valued ideal
/// compensation, outward-safe against the constant's enclosure. Endpooints
/// may be infinite. Requires l <= h.
struct ExactInterval {
    ExactReal lo, hi;
};
ExactInterval invert_intervals(FunctionId f, const ExactReal& l, const ExactReal& h,
                               long recon);

}  // namespace progpoly

#endif
