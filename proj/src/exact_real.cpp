#include "progpoly/exact_real.hpp"

#include <cmath>
#include <stdexcept>

namespace progpoly {

ExactReal::ExactReal(const mpz_class& num, const mpz_class& den) : kind_(Kind::Finite) {
    if (den == 0) throw std::invalid_argument("ExactReal: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

ExactReal ExactReal::from_double(double d) {
    if (std::isnan(d)) return nan();
    if (std::isinf(d)) return d > 0 ? pos_inf() : neg_inf();
    ExactReal r;
    mpq_set_d(r.q_.get_mpq_t(), d);  // exact
    return r;
}

ExactReal ExactReal::pow2(long k) {
    ExactReal r(1L);
    return r.mul_pow2(k);
}

int ExactReal::sign() const {
    switch (kind_) {
        case Kind::Finite: return sgn(q_);
        case Kind::PosInf: return 1;
        case Kind::NegInf: return -1;
        default: throw std::domain_error("ExactReal: sign of NaN");
    }
}

const mpq_class& ExactReal::rational() const {
    if (!is_finite()) throw std::domain_error("ExactReal: rational() on non-finite");
    return q_;
}

ExactReal ExactReal::operator-() const {
    switch (kind_) {
        case Kind::Finite: {
            ExactReal r;
            r.q_ = -q_;
            return r;
        }
        case Kind::PosInf: return neg_inf();
        case Kind::NegInf: return pos_inf();
        default: return nan();
    }
}

ExactReal ExactReal::operator+(const ExactReal& o) const {
    if (is_nan() || o.is_nan()) return nan();
    if (is_finite() && o.is_finite()) return ExactReal(mpq_class(q_ + o.q_));
    if (is_finite()) return o;
    if (o.is_finite()) return *this;
    if (kind_ == o.kind_) return *this;
    return nan();  // opposite infinities
}

ExactReal ExactReal::operator-(const ExactReal& o) const { return *this + (-o); }

ExactReal ExactReal::operator*(const ExactReal& o) const {
    if (is_nan() || o.is_nan()) return nan();
    if (is_finite() && o.is_finite()) return ExactReal(mpq_class(q_ * o.q_));
    if (is_zero() || o.is_zero()) return nan();  // 0 * inf
    return sign() * o.sign() > 0 ? pos_inf() : neg_inf();
}

ExactReal ExactReal::operator/(const ExactReal& o) const {
    if (is_nan() || o.is_nan()) return nan();
    if (!o.is_finite() || o.is_zero())
        throw std::domain_error("ExactReal: division requires finite nonzero divisor");
    if (!is_finite()) return o.sign() > 0 ? *this : -*this;
    return ExactReal(mpq_class(q_ / o.q_));
}

ExactReal ExactReal::abs() const { return sign() >= 0 ? *this : -*this; }

ExactReal ExactReal::mul_pow2(long k) const {
    if (!is_finite()) return *this;
    ExactReal r;
    if (k >= 0)
        mpq_mul_2exp(r.q_.get_mpq_t(), q_.get_mpq_t(), static_cast<unsigned long>(k));
    else
        mpq_div_2exp(r.q_.get_mpq_t(), q_.get_mpq_t(), static_cast<unsigned long>(-k));
    return r;
}

int ExactReal::compare(const ExactReal& o) const {
    if (is_nan() || o.is_nan()) throw std::domain_error("ExactReal: compare with NaN");
    if (is_finite() && o.is_finite()) return cmp(q_, o.q_);
    if (kind_ == o.kind_) return 0;
    if (kind_ == Kind::NegInf || o.kind_ == Kind::PosInf) return -1;
    return 1;
}

long ExactReal::floor_log2() const {
    if (!is_finite() || is_zero()) throw std::domain_error("ExactReal: floor_log2 domain");
    const mpz_class num = ::abs(q_.get_num());
    const mpz_class den = q_.get_den();
    long k = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
    // |x| is within a factor of two of 2^k; adjust by exact comparison.
    auto at_least_pow2 = [&](long e) {
        mpz_class lhs = num, rhs = den;
        if (e >= 0)
            rhs <<= static_cast<unsigned long>(e);
        else
            lhs <<= static_cast<unsigned long>(-e);
        return lhs >= rhs;
    };
    if (!at_least_pow2(k)) --k;
    while (at_least_pow2(k + 1)) ++k;
    return k;
}

bool ExactReal::is_integer() const { return is_finite() && q_.get_den() == 1; }

mpz_class ExactReal::to_integer() const {
    if (!is_integer()) throw std::domain_error("ExactReal: not an integer");
    return q_.get_num();
}

std::string ExactReal::str() const {
    switch (kind_) {
        case Kind::Finite: return q_.get_str();
        case Kind::PosInf: return "+inf";
        case Kind::NegInf: return "-inf";
        default: return "nan";
    }
}

}  // namespace progpoly
