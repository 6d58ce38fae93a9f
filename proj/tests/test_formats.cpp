#include "doctest.h"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "progpoly/formats.hpp"

using namespace progpoly;

namespace {

// Scan-based rounding oracle: decode every encoding of the format and pick
// the winner directly from the mode's definition. Slow, used to cross-check
// round_exact on small formats.
FpValue brute_round(const ExactReal& x, FpFormat fmt, RoundingMode mode) {
    struct Entry {
        std::uint64_t bits;
        ExactReal val;
    };
    std::vector<Entry> finite;
    enumerate(fmt, [&](FpValue v) {
        if (v.is_finite()) finite.push_back({v.bits, decode(v)});
    });

    if (x.is_zero()) return pos_zero(fmt);
    const bool neg = x.sign() < 0;
    auto zero_bits = [&]() { return neg ? neg_zero(fmt).bits : pos_zero(fmt).bits; };

    // Exactly representable values are fixed points of every mode.
    for (const auto& e : finite)
        if (e.val == x && !FpValue{fmt, e.bits}.is_zero()) return FpValue{fmt, e.bits};

    const ExactReal maxfin = decode(max_finite(fmt, false));
    const ExactReal top_ulp = maxfin - decode(prev_before(max_finite(fmt, false)));
    const ExactReal over_mid = maxfin + top_ulp.mul_pow2(-1);

    auto below = [&]() {  // largest finite value <= x
        std::optional<Entry> best;
        for (const auto& e : finite)
            if (e.val <= x && (!best || e.val > best->val)) best = e;
        return best;
    };
    auto above = [&]() {  // smallest finite value >= x
        std::optional<Entry> best;
        for (const auto& e : finite)
            if (e.val >= x && (!best || e.val < best->val)) best = e;
        return best;
    };
    auto as_value = [&](const std::optional<Entry>& e) {
        // A zero-valued winner keeps the sign of the inexact input.
        if (e->val.is_zero()) return FpValue{fmt, zero_bits()};
        return FpValue{fmt, e->bits};
    };

    switch (mode) {
        case RoundingMode::TowardPositive: {
            auto e = above();
            return e ? as_value(e) : pos_inf(fmt);
        }
        case RoundingMode::TowardNegative: {
            auto e = below();
            return e ? as_value(e) : neg_inf(fmt);
        }
        case RoundingMode::TowardZero: {
            auto e = neg ? above() : below();
            return as_value(e);  // always exists: zero is on the truncation side
        }
        case RoundingMode::NearestEven:
        case RoundingMode::NearestAway: {
            if (x.abs() >= over_mid) return neg ? neg_inf(fmt) : pos_inf(fmt);
            auto lo = below();
            auto hi = above();
            if (!lo) return neg_inf(fmt);
            if (!hi) return pos_inf(fmt);
            const int c = (x - lo->val).compare(hi->val - x);
            if (c < 0) return as_value(lo);
            if (c > 0) return as_value(hi);
            if (mode == RoundingMode::NearestAway)
                return as_value(x.sign() > 0 ? hi : lo);
            return as_value((lo->bits & 1) == 0 ? lo : hi);
        }
        case RoundingMode::ToOdd: {
            if (x.abs() > maxfin) return max_finite(fmt, neg);
            auto lo = below();
            auto hi = above();
            if ((lo->bits & 1) != 0 && !FpValue{fmt, lo->bits}.is_zero()) return as_value(lo);
            return as_value(hi);
        }
    }
    return quiet_nan(fmt);
}

std::vector<ExactReal> dense_rationals(FpFormat fmt, std::mt19937_64& rng, int randoms) {
    std::vector<ExactReal> xs;
    std::vector<ExactReal> finite;
    enumerate(fmt, [&](FpValue v) {
        if (v.is_finite() && !v.sign()) finite.push_back(decode(v));
    });
    std::sort(finite.begin(), finite.end());
    for (size_t i = 0; i + 1 < finite.size(); i += 7) {
        const ExactReal mid = (finite[i] + finite[i + 1]).mul_pow2(-1);
        xs.push_back(mid);
        xs.push_back(-mid);
        xs.push_back(finite[i]);
        const ExactReal off = (finite[i + 1] - finite[i]) / ExactReal(5L);
        xs.push_back(finite[i] + off);
        xs.push_back(-(finite[i] + off + off));
    }
    std::uniform_int_distribution<long> num(-(1L << 30), 1L << 30);
    std::uniform_int_distribution<long> den(1, 1L << 20);
    std::uniform_int_distribution<int> sc(-20, 20);
    for (int i = 0; i < randoms; ++i) {
        long n = num(rng);
        long d = den(rng);
        if (n == 0) n = 1;
        xs.push_back(ExactReal(mpz_class(n), mpz_class(d)).mul_pow2(sc(rng)));
    }
    return xs;
}

}  // namespace

TEST_CASE("decode basics") {
    const FpFormat bf16 = FpFormat::bfloat16();
    CHECK(decode(FpValue{bf16, 0x3F80}) == ExactReal(1L));
    CHECK(decode(FpValue{bf16, 0x0001}) == ExactReal::pow2(-133));
    const FpFormat tf32 = FpFormat::tensorfloat32();
    CHECK(decode(pos_inf(tf32)).kind() == ExactReal::Kind::PosInf);
    CHECK(pos_inf(tf32).bits == 0x3FC00);  // exponent all ones, mantissa zero
    CHECK(decode(quiet_nan(tf32)).is_nan());
    CHECK(decode(FpValue{bf16, 0xC000}) == ExactReal(-2L));
    CHECK(decode(neg_zero(bf16)).is_zero());
}

TEST_CASE("decode/encode identity on encodings") {
    const FpFormat f = FpFormat::make(12, 5);
    enumerate(f, [&](FpValue v) {
        if (!v.is_finite()) return;
        const ExactReal x = decode(v);
        const FpValue r = round_exact(x, f, RoundingMode::NearestEven);
        if (v.is_zero())
            CHECK(r.bits == pos_zero(f).bits);
        else
            CHECK(r.bits == v.bits);
    });
}

TEST_CASE("round_exact spec examples") {
    const FpFormat bf16 = FpFormat::bfloat16();
    const ExactReal x = ExactReal(1L) + ExactReal::pow2(-9);
    CHECK(round_exact(x, bf16, RoundingMode::ToOdd).bits == 0x3F81);
    CHECK(round_exact(ExactReal(1L), bf16, RoundingMode::ToOdd).bits == 0x3F80);
    const ExactReal mid = ExactReal(1L) + ExactReal::pow2(-8);  // halfway to 0x3F81
    CHECK(round_exact(mid, bf16, RoundingMode::NearestEven).bits == 0x3F80);
    CHECK(round_exact(mid, bf16, RoundingMode::NearestAway).bits == 0x3F81);
}

TEST_CASE("round_exact matches the scan oracle on fp(10,8), all six modes") {
    const FpFormat f = FpFormat::make(10, 8);
    std::mt19937_64 rng(7);
    const auto xs = dense_rationals(f, rng, 300);
    const RoundingMode modes[] = {RoundingMode::NearestEven, RoundingMode::NearestAway,
                                  RoundingMode::TowardZero, RoundingMode::TowardPositive,
                                  RoundingMode::TowardNegative, RoundingMode::ToOdd};
    for (const auto& x : xs) {
        for (RoundingMode m : modes) {
            const FpValue got = round_exact(x, f, m);
            const FpValue want = brute_round(x, f, m);
            CAPTURE(x.str());
            CAPTURE(to_string(m));
            CHECK(got.bits == want.bits);
        }
    }
}

TEST_CASE("monotonicity of rounding") {
    const FpFormat f = FpFormat::make(11, 6);
    std::mt19937_64 rng(9);
    auto xs = dense_rationals(f, rng, 200);
    std::sort(xs.begin(), xs.end());
    for (RoundingMode m : {RoundingMode::NearestEven, RoundingMode::TowardPositive,
                           RoundingMode::TowardNegative, RoundingMode::ToOdd}) {
        for (size_t i = 0; i + 1 < xs.size(); ++i) {
            const ExactReal a = decode(round_exact(xs[i], f, m));
            const ExactReal b = decode(round_exact(xs[i + 1], f, m));
            if (a.is_nan() || b.is_nan()) continue;
            CHECK(a <= b);
        }
    }
}

TEST_CASE("round-to-odd parity") {
    const FpFormat f = FpFormat::make(13, 6);
    std::mt19937_64 rng(11);
    for (const auto& x : dense_rationals(f, rng, 200)) {
        const FpValue v = round_exact(x, f, RoundingMode::ToOdd);
        if (!v.is_finite()) continue;
        if (decode(v) == x) continue;  // exact values map to themselves
        CHECK(v.encoding_odd());
    }
}

TEST_CASE("binary64 rounding agrees with hardware round-to-nearest") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> sc(-60, 60);
    for (int i = 0; i < 2000; ++i) {
        const double a = std::ldexp(U(rng), sc(rng));
        const double b = std::ldexp(U(rng), sc(rng));
        const double hw = a * b;
        const double mine = round_to_binary64(ExactReal::from_double(a) *
                                              ExactReal::from_double(b));
        CHECK(hw == mine);
        const double hs = a + b;
        const double ms = round_to_binary64(ExactReal::from_double(a) +
                                            ExactReal::from_double(b));
        CHECK(hs == ms);
    }
}

TEST_CASE("enumerate counts, order, cap") {
    int count = 0;
    std::uint64_t first = 99;
    enumerate(FpFormat::make(10, 8), [&](FpValue v) {
        if (count == 0) first = v.bits;
        ++count;
    });
    CHECK(count == 1024);
    CHECK(first == 0);
    count = 0;
    enumerate(FpFormat::bfloat16(), [&](FpValue) { ++count; });
    CHECK(count == 65536);
    CHECK_THROWS(enumerate(FpFormat::float32(), [](FpValue) {}));
}

TEST_CASE("next_after / prev_before adjacency") {
    const FpFormat bf16 = FpFormat::bfloat16();
    CHECK(next_after(FpValue{bf16, 0x3F80}).bits == 0x3F81);
    CHECK(next_after(neg_zero(bf16)).bits == 0x0001);
    CHECK(next_after(pos_zero(bf16)).bits == 0x0001);
    CHECK(prev_before(min_subnormal(bf16, false)).bits == pos_zero(bf16).bits);
    CHECK(prev_before(pos_zero(bf16)).bits == min_subnormal(bf16, true).bits);
    CHECK(next_after(min_subnormal(bf16, true)).bits == neg_zero(bf16).bits);
    CHECK(next_after(max_finite(bf16, false)).bits == pos_inf(bf16).bits);
    CHECK(prev_before(max_finite(bf16, true)).bits == neg_inf(bf16).bits);
    // walking the whole positive ray is strictly increasing in value
    FpValue v = pos_zero(bf16);
    ExactReal last = decode(v);
    for (int i = 0; i < 1000; ++i) {
        v = next_after(v);
        if (!v.is_finite()) break;
        CHECK(decode(v) > last);
        last = decode(v);
    }
}

TEST_CASE("double-rounding through round-to-odd at n+2 bits") {
    // For every k with |E|+1 < k <= n, rounding to k bits via the (n+2)-bit
    // round-to-odd value equals rounding directly, in all five IEEE modes.
    const int E = 5, n = 12;
    const FpFormat wide = FpFormat::make(n + 2, E);
    std::mt19937_64 rng(17);
    const auto xs = dense_rationals(FpFormat::make(n, E), rng, 400);
    for (const auto& x : xs) {
        const ExactReal via = decode(round_exact(x, wide, RoundingMode::ToOdd));
        if (via.is_nan()) continue;
        for (int k = E + 2; k <= n; ++k) {
            const FpFormat tgt = FpFormat::make(k, E);
            for (RoundingMode m : kIeeeModes) {
                const FpValue direct = round_exact(x, tgt, m);
                const FpValue hopped = round_exact(via, tgt, m);
                CAPTURE(x.str());
                CAPTURE(k);
                CAPTURE(to_string(m));
                CHECK(direct.bits == hopped.bits);
            }
        }
    }
}

TEST_CASE("odd overflow policy") {
    const FpFormat f = FpFormat::make(10, 8);
    const ExactReal huge = decode(max_finite(f, false)) * ExactReal(3L);
    CHECK(round_exact(huge, f, RoundingMode::ToOdd).bits == max_finite(f, false).bits);
    CHECK(round_exact(huge, f, RoundingMode::ToOdd, OddOverflow::ToInfinity).bits ==
          pos_inf(f).bits);
    CHECK(max_finite(f, false).encoding_odd());
    CHECK(round_exact(-huge, f, RoundingMode::ToOdd).bits == max_finite(f, true).bits);
}

TEST_CASE("format parsing") {
    CHECK(parse_format("bfloat16") == FpFormat::bfloat16());
    CHECK(parse_format("fp(19,8)") == FpFormat::tensorfloat32());
    CHECK(parse_format("fp(19, 8)") == FpFormat::tensorfloat32());
    CHECK(parse_format("float32") == FpFormat::float32());
    CHECK_THROWS(parse_format("fp(9)"));
    CHECK_THROWS(FpFormat::make(10, 9));  // no mantissa bit left
    CHECK_THROWS(FpFormat::make(8, 1));
}

TEST_CASE("signed zero behavior of directed rounding") {
    const FpFormat f = FpFormat::bfloat16();
    const ExactReal tiny = ExactReal::pow2(-140);  // below half the min subnormal
    CHECK(round_exact(tiny, f, RoundingMode::TowardZero).bits == pos_zero(f).bits);
    CHECK(round_exact(-tiny, f, RoundingMode::TowardZero).bits == neg_zero(f).bits);
    CHECK(round_exact(-tiny, f, RoundingMode::TowardPositive).bits == neg_zero(f).bits);
    CHECK(round_exact(-tiny, f, RoundingMode::TowardNegative).bits ==
          min_subnormal(f, true).bits);
    CHECK(round_exact(tiny, f, RoundingMode::NearestEven).bits == pos_zero(f).bits);
    CHECK(round_exact(-tiny, f, RoundingMode::NearestEven).bits == neg_zero(f).bits);
    CHECK(round_exact(tiny, f, RoundingMode::ToOdd).bits == min_subnormal(f, false).bits);
    CHECK(round_exact(-tiny, f, RoundingMode::ToOdd).bits == min_subnormal(f, true).bits);
    CHECK(round_exact(ExactReal(0L), f, RoundingMode::TowardNegative).bits ==
          pos_zero(f).bits);
}
