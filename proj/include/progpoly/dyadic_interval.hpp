#ifndef PROGPOLY_DYADIC_INTERVAL_HPP
#define PROGPOLY_DYADIC_INTERVAL_HPP

#include <gmpxx.h>

#include "progpoly/exact_real.hpp"

namespace progpoly {

/// A dyadic rational mant * 2^exp. The working representation for the
/// bracket arithmetic: every operation rounds mantissas back to a requested
/// bit width with an explicit direction, so enclosures stay rigorous.
struct Dyadic {
    mpz_class mant;
    long exp = 0;

    Dyadic() = default;
    Dyadic(long m, long e) : mant(m), exp(e) {}
    Dyadic(mpz_class m, long e) : mant(std::move(m)), exp(e) {}

    static Dyadic zero() { return Dyadic(); }
    static Dyadic one() { return Dyadic(1, 0); }

    bool is_zero() const { return mant == 0; }
    int sign() const { return sgn(mant); }

    ExactReal to_exact() const { return ExactReal(mant, 1).mul_pow2(exp); }

    int compare(const Dyadic& o) const;
    bool operator<(const Dyadic& o) const { return compare(o) < 0; }
    bool operator<=(const Dyadic& o) const { return compare(o) <= 0; }
    bool operator==(const Dyadic& o) const { return compare(o) == 0; }
};

Dyadic round_down(const Dyadic& d, long precision);  // toward -inf
Dyadic round_up(const Dyadic& d, long precision);    // toward +inf

Dyadic round_down(const mpq_class& q, long precision);
Dyadic round_up(const mpq_class& q, long precision);

/// Closed interval [lo, hi] of dyadic rationals enclosing some real value.
/// All arithmetic rounds lo down and hi up at the carried precision.
class DyadicInterval {
  public:
    DyadicInterval() = default;
    DyadicInterval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}

    static DyadicInterval exact(const Dyadic& d) { return DyadicInterval(d, d); }
    static DyadicInterval exact_int(long v) { return exact(Dyadic(v, 0)); }
    static DyadicInterval from_rational(const mpq_class& q, long precision);

    const Dyadic& lo() const { return lo_; }
    const Dyadic& hi() const { return hi_; }
    ExactReal lo_exact() const { return lo_.to_exact(); }
    ExactReal hi_exact() const { return hi_.to_exact(); }

    bool strictly_positive() const { return lo_.sign() > 0; }

    DyadicInterval add(const DyadicInterval& o, long prec) const;
    DyadicInterval sub(const DyadicInterval& o, long prec) const;
    DyadicInterval mul(const DyadicInterval& o, long prec) const;
    DyadicInterval div_uint(unsigned long k, long prec) const;
    DyadicInterval div(const DyadicInterval& o, long prec) const;  // o strictly positive
    DyadicInterval mul_pow2(long k) const;
    DyadicInterval neg() const { return DyadicInterval(Dyadic(-hi_.mant, hi_.exp),
                                                       Dyadic(-lo_.mant, lo_.exp)); }
    DyadicInterval square(long prec) const { return mul(*this, prec); }

    /// Widen symmetrically by +/- eps where eps = 2^e.
    DyadicInterval pad(long e, long prec) const;

    /// |hi - lo| <= 2^e ?
    bool width_at_most_pow2(long e) const;

    /// max(|lo|,|hi|) < 2^e ?
    bool magnitude_below_pow2(long e) const;

  private:
    Dyadic lo_, hi_;
};

}  // namespace progpoly

#endif
