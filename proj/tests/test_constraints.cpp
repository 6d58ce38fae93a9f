#include "doctest.h"

#include <map>
#include <random>
#include <sstream>

#include "progpoly/constraints.hpp"
#include "progpoly/runtime.hpp"

using namespace progpoly;

namespace {

FpValue enc(FpFormat f, double v) { return value_from_double(v, f); }

// Brute membership check: a rational x is in the interval iff it rounds to y.
bool rounds_to(const ExactReal& x, FpValue y, RoundingMode m) {
    return round_exact(x, y.format, m).bits == y.bits;
}

}  // namespace

TEST_CASE("rounding_interval spec examples") {
    const FpFormat f21 = FpFormat::make(21, 8);
    // exact even encoding under ro: singleton
    const FpValue two = enc(f21, 2.0);
    REQUIRE(!two.encoding_odd());
    auto iv = rounding_interval(two, RoundingMode::ToOdd);
    CHECK(iv.lower == ExactReal(2L));
    CHECK(iv.upper == ExactReal(2L));
    CHECK(!iv.lower_open);
    CHECK(!iv.upper_open);
    // odd encoding: open interval between even neighbors
    const FpValue odd{f21, two.bits + 1};
    REQUIRE(odd.encoding_odd());
    iv = rounding_interval(odd, RoundingMode::ToOdd);
    CHECK(iv.lower == decode(two));
    CHECK(iv.upper == decode(FpValue{f21, two.bits + 2}));
    CHECK(iv.lower_open);
    CHECK(iv.upper_open);
}

TEST_CASE("rounding_interval of 1.0 in bfloat16 under rn, derived by brute force") {
    const FpFormat bf16 = FpFormat::bfloat16();
    const FpValue one = enc(bf16, 1.0);
    const auto iv = rounding_interval(one, RoundingMode::NearestEven);
    // derived: [1 - 2^-9, 1 + 2^-8], closed (even encoding)
    CHECK(iv.lower == ExactReal(1L) - ExactReal::pow2(-9));
    CHECK(iv.upper == ExactReal(1L) + ExactReal::pow2(-8));
    CHECK(!iv.lower_open);
    CHECK(!iv.upper_open);
    // brute force: rationals straddling each endpoint
    std::mt19937_64 rng(71);
    for (int i = 0; i < 1000; ++i) {
        const ExactReal off = ExactReal(static_cast<long>(rng() % 2048) + 1).mul_pow2(-24);
        CHECK(rounds_to(iv.lower + off, one, RoundingMode::NearestEven));
        CHECK(!rounds_to(iv.lower - off, one, RoundingMode::NearestEven));
        CHECK(rounds_to(iv.upper - off, one, RoundingMode::NearestEven));
        CHECK(!rounds_to(iv.upper + off, one, RoundingMode::NearestEven));
    }
    CHECK(rounds_to(iv.lower, one, RoundingMode::NearestEven));
    CHECK(rounds_to(iv.upper, one, RoundingMode::NearestEven));
}

TEST_CASE("rounding_interval membership property across modes") {
    const FpFormat f = FpFormat::make(12, 6);
    std::mt19937_64 rng(73);
    const RoundingMode modes[] = {RoundingMode::NearestEven, RoundingMode::NearestAway,
                                  RoundingMode::TowardZero, RoundingMode::TowardPositive,
                                  RoundingMode::TowardNegative, RoundingMode::ToOdd};
    int done = 0;
    while (done < 150) {
        const FpValue y{f, rng() & f.encoding_mask()};
        if (!y.is_finite()) continue;
        if (y.is_zero() && y.sign()) continue;  // -0 intervals are mode-dependent corner cases
        ++done;
        for (RoundingMode m : modes) {
            const auto iv = rounding_interval(y, m);
            if (iv.lower.is_nan() || !(iv.lower <= iv.upper)) continue;
            // sample inside and at endpoints
            for (int i = 0; i < 12; ++i) {
                ExactReal t = ExactReal(static_cast<long>(rng() % 1023) + 1).mul_pow2(-10);
                if (!iv.lower.is_finite() || !iv.upper.is_finite()) continue;
                const ExactReal x = iv.lower + (iv.upper - iv.lower) * t;
                const FpValue got = round_exact(x, f, m);
                // value equality; the encoding may be the other zero
                if (x == decode(y) && y.is_zero()) continue;
                CAPTURE(to_string(m));
                CAPTURE(y.bits);
                CHECK(decode(got) == decode(round_exact(x, f, m)));
                const bool inside =
                    (iv.lower_open ? x > iv.lower : x >= iv.lower) &&
                    (iv.upper_open ? x < iv.upper : x <= iv.upper);
                if (inside) CHECK(got.bits == y.bits);
            }
        }
    }
}

TEST_CASE("build constraints: counting contract and the power-of-two singleton") {
    const std::vector<LadderRung> ladder = {
        LadderRung::ro_rung(FpFormat::make(10, 8), 2),
        LadderRung::ro_rung(FpFormat::make(12, 8), 3),
    };
    ConstraintSet cs = build_progressive_constraints(FunctionId::Log2, ladder, 4);
    // every finite positive nonzero input contributes exactly one constraint
    std::uint64_t expect = 0;
    for (const auto& r : ladder) {
        enumerate(r.format, [&](FpValue v) {
            if (v.is_finite() && !v.is_zero() && !v.sign()) ++expect;
        });
    }
    CHECK(cs.items.size() + cs.forced_specials.size() == expect);
    CHECK(cs.forced_specials.empty());  // log2 pullback is exact
    CHECK(cs.weight_sum() == cs.items.size());

    // the spec's example: input 4.0 pulls back to the singleton P(1.0) = 0
    bool found = false;
    for (const auto& c : cs.items) {
        bool has4 = false;
        for (auto [encoding, rung] : c.sources)
            if (rung == 1 && encoding == enc(FpFormat::make(12, 8), 4.0).bits) has4 = true;
        if (!has4) continue;
        found = true;
        CHECK(c.x == 1.0);
        CHECK(c.lo == 0.0);
        CHECK(c.hi == 0.0);
        CHECK(c.term_count == 3);
    }
    CHECK(found);

    // monotone nesting: per original input, wider formats give nested intervals
    std::map<double, std::pair<double, double>> small_by_value;
    for (const auto& c : cs.items)
        for (auto [encoding, rung] : c.sources)
            if (rung == 0)
                small_by_value[decode_to_double(FpValue{ladder[0].format, encoding})] = {
                    c.lo, c.hi};
    int nested = 0;
    for (const auto& c : cs.items) {
        for (auto [encoding, rung] : c.sources) {
            if (rung != 1) continue;
            const double v = decode_to_double(FpValue{ladder[1].format, encoding});
            auto it = small_by_value.find(v);
            if (it == small_by_value.end()) continue;
            CHECK(it->second.first <= c.lo);
            CHECK(c.hi <= it->second.second);
            ++nested;
        }
    }
    CHECK(nested > 100);
}

TEST_CASE("merge intersects, keeps max weight, reports conflicts") {
    ConstraintSet cs;
    cs.k_max = 2;
    IntervalConstraint a{1.5, 0.58, 0.59, 2, 1, {{10, 0}}};
    IntervalConstraint b{1.5, 0.584, 0.595, 2, 3, {{11, 0}}};
    IntervalConstraint c{1.5, 0.58, 0.59, 2, 2, {{12, 0}}};
    cs.items = {a, b, c};
    merge_duplicate_inputs(cs);
    REQUIRE(cs.items.size() == 1);
    CHECK(cs.items[0].lo == 0.584);
    CHECK(cs.items[0].hi == 0.59);
    CHECK(cs.items[0].weight == 3);  // max
    CHECK(cs.items[0].sources.size() == 3);
    CHECK(cs.conflicts.empty());

    ConstraintSet dj;
    dj.k_max = 2;
    dj.items = {IntervalConstraint{1.0, 0.0, 0.0, 1, 1, {{1, 0}}},
                IntervalConstraint{1.0, 0.5, 0.5, 1, 1, {{2, 0}}},
                IntervalConstraint{1.0, 0.1, 0.2, 2, 1, {{3, 0}}}};
    merge_duplicate_inputs(dj);
    CHECK(dj.conflicts.size() == 1);
    CHECK(dj.items.size() == 1);  // the (x=1, k=2) row survives
}

TEST_CASE("constraint soundness on random subsamples") {
    // any binary64 value inside a constraint interval compensates and rounds
    // to the oracle result of every originating input, in all five modes
    const std::vector<LadderRung> ladder = {LadderRung::ro_rung(FpFormat::make(11, 8), 2)};
    ConstraintSet cs = build_progressive_constraints(FunctionId::Exp2, ladder, 3);
    merge_duplicate_inputs(cs);
    REQUIRE(cs.conflicts.empty());
    std::mt19937_64 rng(79);
    int checked = 0;
    for (int t = 0; t < 400; ++t) {
        const auto& c = cs.items[rng() % cs.items.size()];
        const double v = c.lo + (c.hi - c.lo) * (static_cast<double>(rng() % 1025) / 1024.0);
        for (auto [encoding, rung] : c.sources) {
            const FpValue input{ladder[0].format, encoding};
            const auto red = range_reduce(FunctionId::Exp2, decode_to_double(input));
            const double y = output_compensate(FunctionId::Exp2, v, red.recon);
            for (RoundingMode m : kIeeeModes) {
                const auto want = oracle_round(FunctionId::Exp2, input,
                                               ladder[0].format, m);
                const FpValue got = round_exact(ExactReal::from_double(y),
                                                ladder[0].format, m);
                CHECK(got.bits == want.result.value.bits);
                ++checked;
            }
        }
    }
    CHECK(checked >= 1000);
}

TEST_CASE("constraint dump is one hex line per constraint") {
    ConstraintSet cs;
    cs.items = {IntervalConstraint{1.0, 0.0, 0.5, 2, 7, {{1, 0}}}};
    std::ostringstream out;
    dump_constraints_jsonl(cs, out);
    const std::string s = out.str();
    CHECK(s.find("\"x\":\"0x3FF0000000000000\"") != std::string::npos);
    CHECK(s.find("\"terms\":2") != std::string::npos);
    CHECK(s.find("\"weight\":7") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1);
}
