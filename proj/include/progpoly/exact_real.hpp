#ifndef PROGPOLY_EXACT_REAL_HPP
#define PROGPOLY_EXACT_REAL_HPP

#include <cstdint>
#include <string>
#include <gmpxx.h>

namespace progpoly {

/// Arbitrary-precision rational scalar with distinguished non-finite markers.
/// Finite values are exact; arithmetic between finite values never rounds.
class ExactReal {
  public:
    enum class Kind : std::uint8_t { Finite, PosInf, NegInf, NaN };

    ExactReal() : kind_(Kind::Finite) {}
    explicit ExactReal(long v) : kind_(Kind::Finite), q_(v) {}
    explicit ExactReal(const mpq_class& q) : kind_(Kind::Finite), q_(q) {
        q_.canonicalize();
    }
    explicit ExactReal(const mpz_class& num, const mpz_class& den);

    static ExactReal from_double(double d);  // exact for finite d
    static ExactReal pos_inf() { return ExactReal(Kind::PosInf); }
    static ExactReal neg_inf() { return ExactReal(Kind::NegInf); }
    static ExactReal nan() { return ExactReal(Kind::NaN); }
    static ExactReal pow2(long k);  // 2^k

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_nan() const { return kind_ == Kind::NaN; }
    bool is_inf() const { return kind_ == Kind::PosInf || kind_ == Kind::NegInf; }
    bool is_zero() const { return kind_ == Kind::Finite && q_ == 0; }

    /// -1, 0, +1 for finite values; +/-1 for infinities. NaN is an error.
    int sign() const;

    const mpq_class& rational() const;  // finite only

    ExactReal operator-() const;
    ExactReal operator+(const ExactReal& o) const;
    ExactReal operator-(const ExactReal& o) const;
    ExactReal operator*(const ExactReal& o) const;
    ExactReal operator/(const ExactReal& o) const;  // finite nonzero divisor

    ExactReal abs() const;
    ExactReal mul_pow2(long k) const;  // x * 2^k, exact

    /// Total-order comparison on finite values and infinities; NaN is an error.
    int compare(const ExactReal& o) const;
    bool operator==(const ExactReal& o) const { return compare(o) == 0; }
    bool operator!=(const ExactReal& o) const { return compare(o) != 0; }
    bool operator<(const ExactReal& o) const { return compare(o) < 0; }
    bool operator<=(const ExactReal& o) const { return compare(o) <= 0; }
    bool operator>(const ExactReal& o) const { return compare(o) > 0; }
    bool operator>=(const ExactReal& o) const { return compare(o) >= 0; }

    /// Largest k with 2^k <= |x|. Requires finite nonzero.
    long floor_log2() const;

    bool is_integer() const;
    mpz_class to_integer() const;  // requires is_integer()

    std::string str() const;

  private:
    explicit ExactReal(Kind k) : kind_(k) {}

    Kind kind_;
    mpq_class q_;  // valid only when finite
};

}  // namespace progpoly

#endif
