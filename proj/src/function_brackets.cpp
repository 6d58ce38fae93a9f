#include "progpoly/function_brackets.hpp"

#include <stdexcept>

namespace progpoly {

const char* to_string(FunctionId f) {
    switch (f) {
        case FunctionId::Log2: return "log2";
        case FunctionId::Ln: return "ln";
        case FunctionId::Log10: return "log10";
        case FunctionId::Exp2: return "exp2";
        case FunctionId::Exp: return "exp";
        case FunctionId::Exp10: return "exp10";
    }
    return "?";
}

FunctionId parse_function(std::string_view s) {
    if (s == "log2") return FunctionId::Log2;
    if (s == "ln" || s == "log") return FunctionId::Ln;
    if (s == "log10") return FunctionId::Log10;
    if (s == "exp2") return FunctionId::Exp2;
    if (s == "exp") return FunctionId::Exp;
    if (s == "exp10") return FunctionId::Exp10;
    throw std::invalid_argument("unknown function: " + std::string(s));
}

namespace {

constexpr long kConstantPrecision = 576;  // above the deepest escalation step

long floor_log2_q(const mpq_class& q) {
    return ExactReal(q).floor_log2();
}

// atanh(u) = u + u^3/3 + u^5/5 + ...  for exact rational 0 <= u < 1/2.
DyadicInterval atanh_bracket(const mpq_class& u, long prec) {
    const long wp = prec + 8;
    if (u == 0) return DyadicInterval::exact_int(0);
    const DyadicInterval U = DyadicInterval::from_rational(u, wp);
    const DyadicInterval U2 = U.square(wp);
    DyadicInterval term = U;
    DyadicInterval sum = U;
    for (unsigned long i = 3;; i += 2) {
        term = term.mul(U2, wp);
        const DyadicInterval t = term.div_uint(i, wp);
        sum = sum.add(t, wp);
        // Tail ratio is u^2/(1-u^2) <= 1/3 for u <= 1/2, so once a term is
        // below 2^-(p+6) the remaining tail is below 2^-(p+5).
        if (t.magnitude_below_pow2(-(prec + 6))) break;
    }
    return sum.pad(-(prec + 5), wp);
}

// ln of a positive rational via x = s * 2^e with s in [1,2):
// ln(x) = e*ln2 + 2*atanh((s-1)/(s+1)).
DyadicInterval ln_impl(const mpq_class& x, long prec, const DyadicInterval& ln2) {
    const long wp = prec + 8;
    const long e = floor_log2_q(x);
    mpq_class s = x;
    if (e >= 0)
        mpq_div_2exp(s.get_mpq_t(), s.get_mpq_t(), static_cast<unsigned long>(e));
    else
        mpq_mul_2exp(s.get_mpq_t(), s.get_mpq_t(), static_cast<unsigned long>(-e));
    mpq_class u = (s - 1) / (s + 1);
    DyadicInterval r = atanh_bracket(u, prec + 4).mul_pow2(1);
    if (e != 0) {
        DyadicInterval scale = DyadicInterval::exact_int(e).mul(ln2, wp);
        r = r.add(scale, wp);
    }
    return r;
}

}  // namespace

DyadicInterval ln2_enclosure(long precision) {
    // ln2 = 2*atanh(1/3)
    static const DyadicInterval cached = atanh_bracket(mpq_class(1, 3),
                                                       kConstantPrecision).mul_pow2(1);
    return DyadicInterval(round_down(cached.lo(), precision + 8),
                          round_up(cached.hi(), precision + 8));
}

DyadicInterval ln10_enclosure(long precision) {
    static const DyadicInterval cached = ln_impl(mpq_class(10), kConstantPrecision,
                                                 ln2_enclosure(kConstantPrecision));
    return DyadicInterval(round_down(cached.lo(), precision + 8),
                          round_up(cached.hi(), precision + 8));
}

DyadicInterval ln_bracket(const mpq_class& x, long precision) {
    if (x <= 0) throw std::domain_error("ln_bracket: non-positive argument");
    return ln_impl(x, precision, ln2_enclosure(precision));
}

DyadicInterval log2_bracket(const mpq_class& x, long precision) {
    const long wp = precision + 8;
    return ln_bracket(x, precision + 4).div(ln2_enclosure(precision + 4), wp);
}

DyadicInterval log10_bracket(const mpq_class& x, long precision) {
    const long wp = precision + 8;
    return ln_bracket(x, precision + 4).div(ln10_enclosure(precision + 4), wp);
}

DyadicInterval exp_of_interval(const DyadicInterval& x, long precision) {
    if (!x.magnitude_below_pow2(40))
        throw std::domain_error("exp_of_interval: argument magnitude too large");
    // Scale down until |t| <= 1/4, run the Taylor series, square back up.
    long s = 0;
    while (!x.mul_pow2(-s).magnitude_below_pow2(-2)) ++s;
    const long wp = precision + 2 * s + 16;
    const DyadicInterval t = x.mul_pow2(-s);

    DyadicInterval term = DyadicInterval::exact_int(1);
    DyadicInterval sum = term;
    for (unsigned long i = 1;; ++i) {
        term = term.mul(t, wp).div_uint(i, wp);
        sum = sum.add(term, wp);
        // |t| <= 1/2 makes the tail geometric with ratio <= 1/2.
        if (term.magnitude_below_pow2(-(wp - 8))) break;
    }
    DyadicInterval r = sum.pad(-(wp - 9), wp);
    for (long i = 0; i < s; ++i) r = r.square(wp);
    return r;
}

DyadicInterval exp_bracket(const mpq_class& x, long precision) {
    return exp_of_interval(DyadicInterval::from_rational(x, precision + 16), precision);
}

DyadicInterval exp2_bracket(const mpq_class& x, long precision) {
    const long wp = precision + 16;
    if (x == 0) return DyadicInterval::exact_int(1);
    const DyadicInterval t =
        DyadicInterval::from_rational(x, wp).mul(ln2_enclosure(wp), wp);
    return exp_of_interval(t, precision);
}

DyadicInterval exp10_bracket(const mpq_class& x, long precision) {
    const long wp = precision + 16;
    if (x == 0) return DyadicInterval::exact_int(1);
    const DyadicInterval t =
        DyadicInterval::from_rational(x, wp).mul(ln10_enclosure(wp), wp);
    return exp_of_interval(t, precision);
}

DyadicInterval function_bracket(FunctionId f, const mpq_class& x, long precision) {
    switch (f) {
        case FunctionId::Log2: return log2_bracket(x, precision);
        case FunctionId::Ln: return ln_bracket(x, precision);
        case FunctionId::Log10: return log10_bracket(x, precision);
        case FunctionId::Exp2: return exp2_bracket(x, precision);
        case FunctionId::Exp: return exp_bracket(x, precision);
        case FunctionId::Exp10: return exp10_bracket(x, precision);
    }
    throw std::logic_error("function_bracket: bad id");
}

}  // namespace progpoly
