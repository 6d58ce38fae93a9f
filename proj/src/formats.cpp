#include "progpoly/formats.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace progpoly {

const char* to_string(RoundingMode m) {
    switch (m) {
        case RoundingMode::NearestEven: return "rn";
        case RoundingMode::NearestAway: return "ra";
        case RoundingMode::TowardZero: return "rz";
        case RoundingMode::TowardPositive: return "ru";
        case RoundingMode::TowardNegative: return "rd";
        case RoundingMode::ToOdd: return "ro";
    }
    return "?";
}

RoundingMode parse_rounding_mode(std::string_view s) {
    if (s == "rn") return RoundingMode::NearestEven;
    if (s == "ra") return RoundingMode::NearestAway;
    if (s == "rz") return RoundingMode::TowardZero;
    if (s == "ru") return RoundingMode::TowardPositive;
    if (s == "rd") return RoundingMode::TowardNegative;
    if (s == "ro") return RoundingMode::ToOdd;
    throw std::invalid_argument("unknown rounding mode: " + std::string(s));
}

FpFormat FpFormat::make(int n, int e) {
    if (e < 2) throw std::invalid_argument("format needs at least 2 exponent bits");
    if (1 + e >= n) throw std::invalid_argument("format needs at least one mantissa bit");
    if (n > 64) throw std::invalid_argument("formats wider than 64 bits are not supported");
    FpFormat f;
    f.total_bits = static_cast<std::uint8_t>(n);
    f.exponent_bits = static_cast<std::uint8_t>(e);
    return f;
}

std::string FpFormat::spelling() const {
    return "fp(" + std::to_string(total_bits) + "," + std::to_string(exponent_bits) + ")";
}

FpFormat parse_format(std::string_view s) {
    if (s == "bfloat16") return FpFormat::bfloat16();
    if (s == "tensorfloat32") return FpFormat::tensorfloat32();
    if (s == "float32") return FpFormat::float32();
    std::string t;
    for (char c : s)
        if (c != ' ') t.push_back(c);
    if (t.rfind("fp(", 0) == 0 && t.back() == ')') {
        auto comma = t.find(',');
        if (comma != std::string::npos) {
            int n = std::stoi(t.substr(3, comma - 3));
            int e = std::stoi(t.substr(comma + 1, t.size() - comma - 2));
            return FpFormat::make(n, e);
        }
    }
    throw std::invalid_argument("unrecognized format spelling: " + std::string(s));
}

FpValue pos_zero(FpFormat f) { return FpValue{f, 0}; }
FpValue neg_zero(FpFormat f) { return FpValue{f, 1ULL << (f.total_bits - 1)}; }
FpValue pos_inf(FpFormat f) {
    std::uint64_t e = (1ULL << f.exponent_bits) - 1;
    return FpValue{f, e << f.mantissa_bits()};
}
FpValue neg_inf(FpFormat f) {
    FpValue v = pos_inf(f);
    v.bits |= 1ULL << (f.total_bits - 1);
    return v;
}
FpValue quiet_nan(FpFormat f) {
    FpValue v = pos_inf(f);
    v.bits |= 1ULL << (f.mantissa_bits() - 1);
    return v;
}
FpValue max_finite(FpFormat f, bool negative) {
    std::uint64_t e = (1ULL << f.exponent_bits) - 2;
    std::uint64_t m = (1ULL << f.mantissa_bits()) - 1;
    std::uint64_t bits = (e << f.mantissa_bits()) | m;
    if (negative) bits |= 1ULL << (f.total_bits - 1);
    return FpValue{f, bits};
}
FpValue min_subnormal(FpFormat f, bool negative) {
    std::uint64_t bits = 1;
    if (negative) bits |= 1ULL << (f.total_bits - 1);
    return FpValue{f, bits};
}

ExactReal decode(FpValue v) {
    const FpFormat& f = v.format;
    if (v.is_nan()) return ExactReal::nan();
    if (v.is_inf()) return v.sign() ? ExactReal::neg_inf() : ExactReal::pos_inf();
    const std::uint64_t E = v.exponent_field();
    const std::uint64_t F = v.mantissa_field();
    ExactReal mag;
    if (E == 0) {
        mag = ExactReal(static_cast<long>(F)).mul_pow2(f.emin_sub());
    } else {
        long scaled = static_cast<long>(F) + (1L << f.mantissa_bits());
        mag = ExactReal(scaled).mul_pow2(static_cast<long>(E) - f.bias() - f.mantissa_bits());
    }
    return v.sign() ? -mag : mag;
}

namespace {

// Encode the positive value n * 2^q, with q >= emin_sub and n <= 2^(F+1).
std::uint64_t encode_positive(mpz_class n, long q, FpFormat fmt) {
    const int F = fmt.mantissa_bits();
    if (n == 0) return 0;
    if (n == (mpz_class(1) << (F + 1))) {
        n >>= 1;
        q += 1;
    }
    const std::uint64_t ni = n.get_ui();
    if (n < (mpz_class(1) << F)) {
        return ni;  // subnormal; only reachable with q == emin_sub
    }
    const long E = q + F + fmt.bias();
    return (static_cast<std::uint64_t>(E) << F) | (ni - (1ULL << F));
}

// Round a positive finite rational into the non-negative encoding space.
// Works on the raw numerator/denominator: one scaled division produces the
// candidate mantissa and a remainder, and the remainder against the scaled
// denominator decides exactness and nearest-mode ties.
std::uint64_t round_positive(const mpq_class& x, FpFormat fmt, RoundingMode mode,
                             OddOverflow odd_overflow) {
    const int F = fmt.mantissa_bits();
    const mpz_class& num = x.get_num();
    const mpz_class& den = x.get_den();
    const long e_est = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
                       static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
    // floor(log2 x) is e_est or e_est - 1.

    if (e_est >= fmt.emax()) {  // within reach of the largest finite value
        const ExactReal xe{x};
        const ExactReal maxfin = decode(max_finite(fmt, false));
        if (xe > maxfin) {
            const std::uint64_t inf = pos_inf(fmt).bits;
            const std::uint64_t top = max_finite(fmt, false).bits;
            switch (mode) {
                case RoundingMode::NearestEven:
                case RoundingMode::NearestAway: {
                    const ExactReal mid = maxfin + ExactReal::pow2(fmt.emax() - F - 1);
                    return xe >= mid ? inf : top;
                }
                case RoundingMode::TowardZero:
                case RoundingMode::TowardNegative: return top;
                case RoundingMode::TowardPositive: return inf;
                case RoundingMode::ToOdd:
                    return odd_overflow == OddOverflow::SaturateToLargestOdd ? top : inf;
            }
        }
    }

    long q = std::max(e_est - 1 - F, fmt.emin_sub());
    mpz_class shifted, n_lo, rem, scaled_den = den;
    if (q >= 0) {
        scaled_den <<= static_cast<unsigned long>(q);
        mpz_fdiv_qr(n_lo.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(),
                    scaled_den.get_mpz_t());
    } else {
        shifted = num;
        shifted <<= static_cast<unsigned long>(-q);
        mpz_fdiv_qr(n_lo.get_mpz_t(), rem.get_mpz_t(), shifted.get_mpz_t(),
                    den.get_mpz_t());
    }
    // Fold down until the mantissa fits F+1 bits; the remainder scale doubles.
    const mpz_class lim = mpz_class(1) << (F + 1);
    while (n_lo >= lim) {
        if (mpz_odd_p(n_lo.get_mpz_t())) rem += scaled_den;
        scaled_den <<= 1;
        n_lo >>= 1;
        ++q;
    }

    if (rem == 0) return encode_positive(n_lo, q, fmt);  // exact in every mode

    const std::uint64_t lo_bits = encode_positive(n_lo, q, fmt);
    const std::uint64_t hi_bits = lo_bits + 1;
    switch (mode) {
        case RoundingMode::TowardZero:
        case RoundingMode::TowardNegative: return lo_bits;
        case RoundingMode::TowardPositive: return hi_bits;
        case RoundingMode::ToOdd: return (lo_bits & 1) ? lo_bits : hi_bits;
        case RoundingMode::NearestEven:
        case RoundingMode::NearestAway: {
            // distance below vs above: 2*rem against the scaled denominator
            const int c = mpz_cmp(mpz_class(rem << 1).get_mpz_t(),
                                  scaled_den.get_mpz_t());
            if (c < 0) return lo_bits;
            if (c > 0) return hi_bits;
            if (mode == RoundingMode::NearestAway) return hi_bits;
            return (lo_bits & 1) ? hi_bits : lo_bits;
        }
    }
    return lo_bits;
}

}  // namespace

FpValue round_exact(const ExactReal& x, FpFormat fmt, RoundingMode mode,
                    OddOverflow odd_overflow) {
    switch (x.kind()) {
        case ExactReal::Kind::NaN: return quiet_nan(fmt);
        case ExactReal::Kind::PosInf: return pos_inf(fmt);
        case ExactReal::Kind::NegInf: return neg_inf(fmt);
        case ExactReal::Kind::Finite: break;
    }
    if (x.is_zero()) return pos_zero(fmt);
    const bool negative = x.sign() < 0;
    // Negative values round via the mirrored mode on the magnitude:
    // ru(x) = -rd(-x) and rd(x) = -ru(-x); rn/ra/rz/ro are symmetric.
    RoundingMode m = mode;
    if (negative) {
        if (mode == RoundingMode::TowardPositive) m = RoundingMode::TowardNegative;
        else if (mode == RoundingMode::TowardNegative) m = RoundingMode::TowardPositive;
    }
    std::uint64_t bits;
    if (negative) {
        mpq_class mag(-x.rational());
        bits = round_positive(mag, fmt, m, odd_overflow) | (1ULL << (fmt.total_bits - 1));
    } else {
        bits = round_positive(x.rational(), fmt, m, odd_overflow);
    }
    return FpValue{fmt, bits};
}

void enumerate(FpFormat fmt, const std::function<void(FpValue)>& fn) {
    if (fmt.total_bits > kEnumerationCapBits)
        throw std::invalid_argument("enumerate: " + fmt.spelling() + " exceeds the " +
                                    std::to_string(kEnumerationCapBits) +
                                    "-bit enumeration cap");
    const std::uint64_t last = fmt.encoding_count_minus_one();
    for (std::uint64_t b = 0;; ++b) {
        fn(FpValue{fmt, b});
        if (b == last) break;
    }
}

FpValue next_after(FpValue v) {
    if (!v.is_finite()) throw std::domain_error("next_after: non-finite input");
    const FpFormat f = v.format;
    if (v.is_zero()) return min_subnormal(f, false);
    if (!v.sign()) return FpValue{f, v.bits + 1};
    return FpValue{f, v.bits - 1};  // negative: smaller magnitude (reaches -0)
}

FpValue prev_before(FpValue v) {
    if (!v.is_finite()) throw std::domain_error("prev_before: non-finite input");
    const FpFormat f = v.format;
    if (v.is_zero()) return min_subnormal(f, true);
    if (v.sign()) return FpValue{f, v.bits + 1};
    return FpValue{f, v.bits - 1};  // positive: reaches +0
}

double decode_to_double(FpValue v) {
    const FpFormat f = v.format;
    if (v.is_nan()) return std::numeric_limits<double>::quiet_NaN();
    if (v.is_inf()) return v.sign() ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();
    if (f.mantissa_bits() > 52 || f.emin_sub() < -1074 || f.emax() > 1023)
        throw std::domain_error("decode_to_double: " + f.spelling() +
                                " does not embed in binary64");
    const std::uint64_t E = v.exponent_field();
    const std::uint64_t M = v.mantissa_field();
    double mag;
    if (E == 0)
        mag = std::ldexp(static_cast<double>(M), static_cast<int>(f.emin_sub()));
    else
        mag = std::ldexp(static_cast<double>(M + (1ULL << f.mantissa_bits())),
                         static_cast<int>(E - f.bias() - f.mantissa_bits()));
    return v.sign() ? -mag : mag;
}

FpValue value_from_double(double d, FpFormat fmt) {
    if (std::isnan(d)) return quiet_nan(fmt);
    if (std::isinf(d)) return d > 0 ? pos_inf(fmt) : neg_inf(fmt);
    if (d == 0) return std::signbit(d) ? neg_zero(fmt) : pos_zero(fmt);
    FpValue v = round_exact(ExactReal::from_double(d), fmt, RoundingMode::TowardZero);
    if (decode_to_double(v) != d)
        throw std::domain_error("value_from_double: value not representable in " +
                                fmt.spelling());
    return v;
}

double round_to_binary64(const ExactReal& x) {
    FpValue v = round_exact(x, FpFormat::binary64(), RoundingMode::NearestEven);
    return std::bit_cast<double>(v.bits);
}

}  // namespace progpoly
