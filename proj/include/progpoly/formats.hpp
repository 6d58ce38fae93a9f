#ifndef PROGPOLY_FORMATS_HPP
#define PROGPOLY_FORMATS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "progpoly/exact_real.hpp"

namespace progpoly {

/// The five IEEE rounding modes plus round-to-odd.
enum class RoundingMode : std::uint8_t {
    NearestEven,     // rn
    NearestAway,     // ra
    TowardZero,      // rz
    TowardPositive,  // ru
    TowardNegative,  // rd
    ToOdd,           // ro
};

inline constexpr std::array<RoundingMode, 5> kIeeeModes = {
    RoundingMode::NearestEven, RoundingMode::NearestAway, RoundingMode::TowardZero,
    RoundingMode::TowardPositive, RoundingMode::TowardNegative};

const char* to_string(RoundingMode m);
RoundingMode parse_rounding_mode(std::string_view s);  // "rn","ra","rz","ru","rd","ro"

/// Behavior of round-to-odd past the largest finite magnitude.
enum class OddOverflow : std::uint8_t {
    SaturateToLargestOdd,  // default: the adjacent value reading
    ToInfinity,
};

/// A finite floating-point representation F(n, |E|): 1 sign bit, |E| exponent
/// bits, n-1-|E| mantissa bits, bias 2^(|E|-1)-1.
struct FpFormat {
    std::uint8_t total_bits = 0;
    std::uint8_t exponent_bits = 0;

    static FpFormat make(int n, int e);  // validates 1+|E| < n, |E| >= 2, n <= 64

    static FpFormat bfloat16() { return make(16, 8); }
    static FpFormat tensorfloat32() { return make(19, 8); }
    static FpFormat float32() { return make(32, 8); }
    static FpFormat binary64() { return make(64, 11); }

    int mantissa_bits() const { return total_bits - 1 - exponent_bits; }
    long bias() const { return (1L << (exponent_bits - 1)) - 1; }
    long emax() const { return (1L << exponent_bits) - 2 - bias(); }  // top normal exponent
    long emin() const { return 1 - bias(); }                          // bottom normal exponent
    long emin_sub() const { return emin() - mantissa_bits(); }        // subnormal quantum exponent

    std::uint64_t encoding_mask() const {
        return total_bits == 64 ? ~0ULL : (1ULL << total_bits) - 1;
    }
    std::uint64_t encoding_count_minus_one() const { return encoding_mask(); }

    bool operator==(const FpFormat& o) const = default;

    std::string spelling() const;  // "fp(n,E)"
};

/// Accepts "fp(n,E)" plus aliases "bfloat16", "tensorfloat32", "float32".
FpFormat parse_format(std::string_view s);

/// One encoding of a format, interpreted per IEEE field layout.
struct FpValue {
    FpFormat format;
    std::uint64_t bits = 0;

    bool sign() const { return (bits >> (format.total_bits - 1)) & 1; }
    std::uint64_t exponent_field() const {
        return (bits >> format.mantissa_bits()) & ((1ULL << format.exponent_bits) - 1);
    }
    std::uint64_t mantissa_field() const {
        return bits & ((1ULL << format.mantissa_bits()) - 1);
    }

    bool exponent_all_ones() const {
        return exponent_field() == (1ULL << format.exponent_bits) - 1;
    }
    bool is_nan() const { return exponent_all_ones() && mantissa_field() != 0; }
    bool is_inf() const { return exponent_all_ones() && mantissa_field() == 0; }
    bool is_finite() const { return !exponent_all_ones(); }
    bool is_zero() const { return (bits & (format.encoding_mask() >> 1)) == 0; }
    bool is_subnormal() const { return exponent_field() == 0 && mantissa_field() != 0; }
    bool encoding_odd() const { return bits & 1; }

    bool operator==(const FpValue& o) const { return format == o.format && bits == o.bits; }
};

FpValue pos_zero(FpFormat f);
FpValue neg_zero(FpFormat f);
FpValue pos_inf(FpFormat f);
FpValue neg_inf(FpFormat f);
FpValue quiet_nan(FpFormat f);         // canonical: exponent ones, top mantissa bit set
FpValue max_finite(FpFormat f, bool negative);
FpValue min_subnormal(FpFormat f, bool negative);

/// Real value of an encoding. Specials map to the ExactReal markers
/// (+/-inf, NaN); both zero encodings map to finite 0.
ExactReal decode(FpValue v);

/// Round an exact real (or +/-inf) into a format under a rounding mode.
/// Inexact results that round to zero magnitude keep the sign of the input.
FpValue round_exact(const ExactReal& x, FpFormat fmt, RoundingMode mode,
                    OddOverflow odd_overflow = OddOverflow::SaturateToLargestOdd);

/// All 2^n encodings in ascending unsigned order. Refuses n beyond the cap.
inline constexpr int kEnumerationCapBits = 25;
void enumerate(FpFormat fmt, const std::function<void(FpValue)>& fn);

/// Adjacent representable value in real-value order; +/-0 count as one point.
/// Stepping past the largest finite magnitude yields the infinity.
FpValue next_after(FpValue v);
FpValue prev_before(FpValue v);

/// Exact binary64 value of a format encoding; requires the value to be
/// binary64-representable (true for every format this tool enumerates).
double decode_to_double(FpValue v);

/// Re-encode a binary64 value in fmt; requires exact representability.
FpValue value_from_double(double d, FpFormat fmt);

/// Nearest-even binary64 rounding of an exact real.
double round_to_binary64(const ExactReal& x);

}  // namespace progpoly

#endif
