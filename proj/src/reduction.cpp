#include "progpoly/reduction.hpp"

#include <cmath>
#include <stdexcept>

#include "progpoly/function_brackets.hpp"

namespace progpoly {

namespace {

ConstantBracket from_enclosure(const DyadicInterval& iv) {
    ConstantBracket c;
    c.lo = iv.lo_exact();
    c.hi = iv.hi_exact();
    const double dlo = round_to_binary64(c.lo);
    const double dhi = round_to_binary64(c.hi);
    if (dlo != dhi)
        throw std::logic_error("constant enclosure too wide for a unique binary64");
    c.nearest = dlo;
    c.trivial = false;
    return c;
}

DyadicInterval one_interval() { return DyadicInterval::exact_int(1); }

}  // namespace

const ConstantBracket& compensation_constant(FunctionId f) {
    static const ConstantBracket one{};
    static const ConstantBracket ln2 = from_enclosure(ln2_enclosure(128));
    static const ConstantBracket log10_2 =
        from_enclosure(ln2_enclosure(128).div(ln10_enclosure(128), 136));
    switch (f) {
        case FunctionId::Ln: return ln2;
        case FunctionId::Log10: return log10_2;
        default: return one;  // log2 and the exp family compensate exactly
    }
}

const ConstantBracket& reduction_scale(FunctionId f) {
    static const ConstantBracket one{};
    static const ConstantBracket log2_e =
        from_enclosure(one_interval().div(ln2_enclosure(128), 136));
    static const ConstantBracket log2_10 =
        from_enclosure(ln10_enclosure(128).div(ln2_enclosure(128), 136));
    switch (f) {
        case FunctionId::Exp: return log2_e;
        case FunctionId::Exp10: return log2_10;
        default: return one;
    }
}

ReducedInput range_reduce(FunctionId f, double x) {
    if (!std::isfinite(x)) throw std::domain_error("range_reduce: non-finite input");
    if (is_log_family(f)) {
        if (x <= 0) throw std::domain_error("range_reduce: log of non-positive value");
        int bexp = 0;
        const double half_m = std::frexp(x, &bexp);  // in [0.5, 1)
        return ReducedInput{half_m * 2.0, bexp - 1};  // exact power-of-two scaling
    }
    const ConstantBracket& s = reduction_scale(f);
    const double t = s.trivial ? x : x * s.nearest;
    if (std::abs(t) >= 0x1p52)
        throw std::domain_error("range_reduce: scaled input too large");
    const double i = std::floor(t + 0.5);
    return ReducedInput{t - i, static_cast<long>(i)};
}

ReducedInput range_reduce(FunctionId f, FpValue x) {
    return range_reduce(f, decode_to_double(x));
}

double output_compensate(FunctionId f, double y_reduced, long recon) {
    switch (f) {
        case FunctionId::Log2: return y_reduced + static_cast<double>(recon);
        case FunctionId::Ln:
        case FunctionId::Log10: {
            const double c = compensation_constant(f).nearest;
            return y_reduced * c + static_cast<double>(recon) * c;
        }
        default: {
            const long i = std::min(std::max(recon, -5000L), 5000L);
            return std::scalbn(y_reduced, static_cast<int>(i));
        }
    }
}

ExactInterval invert_intervals(FunctionId f, const ExactReal& l, const ExactReal& h,
                               long recon) {
    if (!(l <= h)) throw std::invalid_argument("invert_intervals: empty input interval");
    switch (f) {
        case FunctionId::Log2: {
            const ExactReal e(recon);
            return ExactInterval{l - e, h - e};
        }
        case FunctionId::Ln:
        case FunctionId::Log10: {
            const ConstantBracket& k = compensation_constant(f);
            const ExactReal e(recon);
            // v must satisfy (v+e)*K in [l,h] for the true K anywhere in the
            // enclosure: divide by the endpoint that shrinks the image.
            ExactReal lo = (l.sign() >= 0 ? l / k.lo : l / k.hi) - e;
            ExactReal hi = (h.sign() >= 0 ? h / k.hi : h / k.lo) - e;
            return ExactInterval{std::move(lo), std::move(hi)};
        }
        default:
            return ExactInterval{l.mul_pow2(-recon), h.mul_pow2(-recon)};
    }
}

}  // namespace progpoly
