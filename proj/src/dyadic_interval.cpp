#include "progpoly/dyadic_interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace progpoly {

int Dyadic::compare(const Dyadic& o) const {
    const int s = sgn(mant), t = sgn(o.mant);
    if (s != t) return s < t ? -1 : 1;
    // Align exponents: compare mant*2^(exp-m) with o.mant*2^(o.exp-m).
    const long m = std::min(exp, o.exp);
    mpz_class a = mant, b = o.mant;
    if (exp > m) a <<= static_cast<unsigned long>(exp - m);
    if (o.exp > m) b <<= static_cast<unsigned long>(o.exp - m);
    return cmp(a, b);
}

namespace {

long bit_length(const mpz_class& m) {
    return m == 0 ? 0 : static_cast<long>(mpz_sizeinbase(m.get_mpz_t(), 2));
}

// Shift the mantissa down to `precision` bits, with the stated direction.
Dyadic shifted(const Dyadic& d, long precision, bool toward_up) {
    const long bits = bit_length(d.mant);
    if (bits <= precision) return d;
    const unsigned long s = static_cast<unsigned long>(bits - precision);
    mpz_class m;
    if (toward_up)
        mpz_cdiv_q_2exp(m.get_mpz_t(), d.mant.get_mpz_t(), s);
    else
        mpz_fdiv_q_2exp(m.get_mpz_t(), d.mant.get_mpz_t(), s);
    return Dyadic(std::move(m), d.exp + static_cast<long>(s));
}

}  // namespace

Dyadic round_down(const Dyadic& d, long precision) { return shifted(d, precision, false); }
Dyadic round_up(const Dyadic& d, long precision) { return shifted(d, precision, true); }

namespace {

Dyadic rational_rounded(const mpq_class& q, long precision, bool toward_up) {
    if (q == 0) return Dyadic::zero();
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    // Scale so the quotient carries precision+2 significant bits.
    const long shift = precision + 2 + bit_length(den) - bit_length(num);
    mpz_class n = num;
    long e = 0;
    if (shift > 0) {
        n <<= static_cast<unsigned long>(shift);
        e = -shift;
    }
    mpz_class quo;
    if (toward_up)
        mpz_cdiv_q(quo.get_mpz_t(), n.get_mpz_t(), den.get_mpz_t());
    else
        mpz_fdiv_q(quo.get_mpz_t(), n.get_mpz_t(), den.get_mpz_t());
    return shifted(Dyadic(std::move(quo), e), precision, toward_up);
}

}  // namespace

Dyadic round_down(const mpq_class& q, long precision) { return rational_rounded(q, precision, false); }
Dyadic round_up(const mpq_class& q, long precision) { return rational_rounded(q, precision, true); }

DyadicInterval DyadicInterval::from_rational(const mpq_class& q, long precision) {
    return DyadicInterval(round_down(q, precision), round_up(q, precision));
}

namespace {

Dyadic add_exact(const Dyadic& a, const Dyadic& b) {
    if (a.mant == 0) return b;
    if (b.mant == 0) return a;
    const long e = std::min(a.exp, b.exp);
    mpz_class x = a.mant, y = b.mant;
    if (a.exp > e) x <<= static_cast<unsigned long>(a.exp - e);
    if (b.exp > e) y <<= static_cast<unsigned long>(b.exp - e);
    return Dyadic(mpz_class(x + y), e);
}

Dyadic mul_exact(const Dyadic& a, const Dyadic& b) {
    return Dyadic(mpz_class(a.mant * b.mant), a.exp + b.exp);
}

}  // namespace

DyadicInterval DyadicInterval::add(const DyadicInterval& o, long prec) const {
    return DyadicInterval(round_down(add_exact(lo_, o.lo_), prec),
                          round_up(add_exact(hi_, o.hi_), prec));
}

DyadicInterval DyadicInterval::sub(const DyadicInterval& o, long prec) const {
    return add(o.neg(), prec);
}

DyadicInterval DyadicInterval::mul(const DyadicInterval& o, long prec) const {
    const Dyadic p1 = mul_exact(lo_, o.lo_);
    const Dyadic p2 = mul_exact(lo_, o.hi_);
    const Dyadic p3 = mul_exact(hi_, o.lo_);
    const Dyadic p4 = mul_exact(hi_, o.hi_);
    const Dyadic* lo = &p1;
    const Dyadic* hi = &p1;
    for (const Dyadic* p : {&p2, &p3, &p4}) {
        if (*p < *lo) lo = p;
        if (*hi < *p) hi = p;
    }
    return DyadicInterval(round_down(*lo, prec), round_up(*hi, prec));
}

namespace {

Dyadic div_mpz(const Dyadic& a, const mpz_class& k, long prec, bool toward_up) {
    if (a.mant == 0) return Dyadic::zero();
    const long shift = prec + 2 + bit_length(k) - bit_length(a.mant);
    mpz_class n = a.mant;
    long e = a.exp;
    if (shift > 0) {
        n <<= static_cast<unsigned long>(shift);
        e -= shift;
    }
    mpz_class quo;
    if (toward_up)
        mpz_cdiv_q(quo.get_mpz_t(), n.get_mpz_t(), k.get_mpz_t());
    else
        mpz_fdiv_q(quo.get_mpz_t(), n.get_mpz_t(), k.get_mpz_t());
    return shifted(Dyadic(std::move(quo), e), prec, toward_up);
}

}  // namespace

DyadicInterval DyadicInterval::div_uint(unsigned long k, long prec) const {
    const mpz_class kz(k);
    return DyadicInterval(div_mpz(lo_, kz, prec, false), div_mpz(hi_, kz, prec, true));
}

DyadicInterval DyadicInterval::div(const DyadicInterval& o, long prec) const {
    if (!o.strictly_positive())
        throw std::domain_error("DyadicInterval::div: divisor must be strictly positive");
    // lo/hi choice depends on the sign of the numerator endpoints.
    auto div_dir = [&](const Dyadic& num, const Dyadic& den, bool toward_up) {
        // num / den with den > 0: scale num by 2^-den.exp then divide by den.mant.
        Dyadic scaled(num.mant, num.exp - den.exp);
        return div_mpz(scaled, den.mant, prec, toward_up);
    };
    const Dyadic& nl = lo_;
    const Dyadic& nh = hi_;
    Dyadic rlo = div_dir(nl, nl.sign() >= 0 ? o.hi_ : o.lo_, false);
    Dyadic rhi = div_dir(nh, nh.sign() >= 0 ? o.lo_ : o.hi_, true);
    return DyadicInterval(std::move(rlo), std::move(rhi));
}

DyadicInterval DyadicInterval::mul_pow2(long k) const {
    return DyadicInterval(Dyadic(lo_.mant, lo_.exp + k), Dyadic(hi_.mant, hi_.exp + k));
}

DyadicInterval DyadicInterval::pad(long e, long prec) const {
    const Dyadic eps(1, e);
    return DyadicInterval(round_down(add_exact(lo_, Dyadic(-1, e)), prec),
                          round_up(add_exact(hi_, eps), prec));
}

bool DyadicInterval::width_at_most_pow2(long e) const {
    const Dyadic w = add_exact(hi_, Dyadic(-lo_.mant, lo_.exp));
    return w <= Dyadic(1, e);
}

bool DyadicInterval::magnitude_below_pow2(long e) const {
    const Dyadic bound(1, e);
    const Dyadic lo_abs(abs(lo_.mant), lo_.exp);
    const Dyadic hi_abs(abs(hi_.mant), hi_.exp);
    return lo_abs < bound && hi_abs < bound;
}

}  // namespace progpoly
