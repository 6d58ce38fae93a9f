#ifndef PROGPOLY_FUNCTION_BRACKETS_HPP
#define PROGPOLY_FUNCTION_BRACKETS_HPP

#include "progpoly/dyadic_interval.hpp"
#include "progpoly/function_id.hpp"

namespace progpoly {

/// Rigorous enclosures of the supported elementary functions over exact
/// rational arguments, at a requested working precision in bits. Built from
/// argument-reduced series (atanh for logarithms, the exponential Taylor
/// series with repeated squaring) with directed rounding throughout, so the
/// true value always lies inside the returned interval.

DyadicInterval ln2_enclosure(long precision);
DyadicInterval ln10_enclosure(long precision);

DyadicInterval ln_bracket(const mpq_class& x, long precision);     // x > 0
DyadicInterval log2_bracket(const mpq_class& x, long precision);   // x > 0
DyadicInterval log10_bracket(const mpq_class& x, long precision);  // x > 0

/// exp of an enclosed exponent; |argument| must stay below 2^40.
DyadicInterval exp_of_interval(const DyadicInterval& x, long precision);

DyadicInterval exp_bracket(const mpq_class& x, long precision);
DyadicInterval exp2_bracket(const mpq_class& x, long precision);
DyadicInterval exp10_bracket(const mpq_class& x, long precision);

/// Dispatch on the function id; log-family arguments must be positive.
DyadicInterval function_bracket(FunctionId f, const mpq_class& x, long precision);

}  // namespace progpoly

#endif
