#include "progpoly/constraints.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace progpoly {

namespace {

ExactReal value_of(FpValue v) { return decode(v); }

RoundingInterval zero_interval(FpValue y, RoundingMode mode) {
    const ExactReal z(0L);
    const ExactReal half_min = decode(min_subnormal(y.format, false)).mul_pow2(-1);
    const ExactReal min_sub = decode(min_subnormal(y.format, false));
    const bool neg = y.sign();
    switch (mode) {
        case RoundingMode::NearestEven:
            return neg ? RoundingInterval{-half_min, z, false, true}
                       : RoundingInterval{z, half_min, false, false};
        case RoundingMode::NearestAway:
            return neg ? RoundingInterval{-half_min, z, true, true}
                       : RoundingInterval{z, half_min, false, true};
        case RoundingMode::TowardZero:
            return neg ? RoundingInterval{-min_sub, z, true, true}
                       : RoundingInterval{z, min_sub, false, true};
        case RoundingMode::TowardPositive:
            return neg ? RoundingInterval{-min_sub, z, true, true}
                       : RoundingInterval{z, z, false, false};
        case RoundingMode::TowardNegative:
            return neg ? RoundingInterval{z, z, false, false}  // degenerate; -0 unreachable
                       : RoundingInterval{z, min_sub, false, true};
        case RoundingMode::ToOdd: return RoundingInterval{z, z, false, false};
    }
    return RoundingInterval{z, z, false, false};
}

RoundingInterval infinity_interval(FpValue y, RoundingMode mode, OddOverflow oo) {
    const bool neg = y.sign();
    const FpValue top = max_finite(y.format, neg);
    const ExactReal tv = value_of(top);
    const ExactReal ulp = (tv - value_of(neg ? next_after(top) : prev_before(top))).abs();
    const ExactReal mid = neg ? tv - ulp.mul_pow2(-1) : tv + ulp.mul_pow2(-1);
    const ExactReal inf = neg ? ExactReal::neg_inf() : ExactReal::pos_inf();
    switch (mode) {
        case RoundingMode::NearestEven:
        case RoundingMode::NearestAway:
            return neg ? RoundingInterval{inf, mid, false, false}
                       : RoundingInterval{mid, inf, false, false};
        case RoundingMode::TowardPositive:
            return neg ? RoundingInterval{inf, inf, false, false}
                       : RoundingInterval{tv, inf, true, false};
        case RoundingMode::TowardNegative:
            return neg ? RoundingInterval{inf, tv, false, true}
                       : RoundingInterval{inf, inf, false, false};
        case RoundingMode::TowardZero: return RoundingInterval{inf, inf, false, false};
        case RoundingMode::ToOdd:
            if (oo == OddOverflow::ToInfinity)
                return neg ? RoundingInterval{inf, tv, false, true}
                           : RoundingInterval{tv, inf, true, false};
            return RoundingInterval{inf, inf, false, false};  // unreachable when saturating
    }
    return RoundingInterval{inf, inf, false, false};
}

}  // namespace

RoundingInterval rounding_interval(FpValue y, RoundingMode mode, OddOverflow oo) {
    if (y.is_nan()) throw std::invalid_argument("rounding_interval: NaN has no interval");
    if (y.is_inf()) return infinity_interval(y, mode, oo);
    if (y.is_zero()) return zero_interval(y, mode);

    const ExactReal val = value_of(y);
    const bool neg = y.sign();
    const FpValue nx = next_after(y);
    const FpValue pv = prev_before(y);
    const ExactReal next_v = value_of(nx);
    const ExactReal prev_v = value_of(pv);

    auto mid_low = [&]() {  // midpoint toward zero side in value order
        if (prev_v.is_inf()) return val - (next_v - val).mul_pow2(-1);
        return (val + prev_v).mul_pow2(-1);
    };
    auto mid_high = [&]() {
        if (next_v.is_inf()) return val + (val - prev_v).mul_pow2(-1);
        return (val + next_v).mul_pow2(-1);
    };

    switch (mode) {
        case RoundingMode::NearestEven: {
            const bool open = y.encoding_odd();
            return RoundingInterval{mid_low(), mid_high(), open, open};
        }
        case RoundingMode::NearestAway: {
            // The tie toward zero belongs to this value, the tie away does not.
            if (!neg) return RoundingInterval{mid_low(), mid_high(), false, true};
            return RoundingInterval{mid_low(), mid_high(), true, false};
        }
        case RoundingMode::TowardZero:
            if (!neg) return RoundingInterval{val, next_v, false, true};
            return RoundingInterval{prev_v, val, true, false};
        case RoundingMode::TowardPositive: return RoundingInterval{prev_v, val, true, false};
        case RoundingMode::TowardNegative: return RoundingInterval{val, next_v, false, true};
        case RoundingMode::ToOdd: {
            if (!y.encoding_odd()) return RoundingInterval{val, val, false, false};
            ExactReal hi = next_v;
            bool hi_open = true;
            if (oo == OddOverflow::ToInfinity && next_v.is_inf()) {
                hi = val;
                hi_open = false;
            }
            ExactReal lo = prev_v;
            bool lo_open = true;
            if (oo == OddOverflow::ToInfinity && prev_v.is_inf()) {
                lo = val;
                lo_open = false;
            }
            return RoundingInterval{std::move(lo), std::move(hi), lo_open, hi_open};
        }
    }
    throw std::logic_error("rounding_interval: bad mode");
}

LadderRung LadderRung::ro_rung(FpFormat fmt, int terms) {
    LadderRung r;
    r.format = fmt;
    r.term_count = terms;
    r.interval_mode = RoundingMode::ToOdd;
    r.interval_format = FpFormat::make(fmt.total_bits + 2, fmt.exponent_bits);
    return r;
}

LadderRung LadderRung::rn_rung(FpFormat fmt, int terms) {
    LadderRung r;
    r.format = fmt;
    r.term_count = terms;
    r.interval_mode = RoundingMode::NearestEven;
    r.interval_format = fmt;
    return r;
}

std::uint64_t ConstraintSet::weight_sum() const {
    std::uint64_t s = 0;
    for (const auto& c : items) s += c.weight;
    return s;
}

namespace {

// Monotone order-preserving key for binary64 bisection.
std::uint64_t dkey(double d) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(d);
    return (u >> 63) ? ~u : (u | 0x8000000000000000ULL);
}
double dunkey(std::uint64_t k) {
    std::uint64_t u = (k >> 63) ? (k & 0x7FFFFFFFFFFFFFFFULL) : ~k;
    return std::bit_cast<double>(u);
}

// Smallest double >= x (or > x when strict); clamps infinities to +/-DBL_MAX.
double ceil_to_double(const ExactReal& x, bool strict) {
    if (x.kind() == ExactReal::Kind::NegInf) return -DBL_MAX;
    if (x.kind() == ExactReal::Kind::PosInf) return DBL_MAX;
    FpValue v = round_exact(x, FpFormat::binary64(), RoundingMode::TowardPositive);
    double d = std::bit_cast<double>(v.bits);
    if (std::isinf(d)) d = DBL_MAX;
    if (strict && ExactReal::from_double(d) == x)
        d = std::nextafter(d, std::numeric_limits<double>::infinity());
    return d;
}

double floor_to_double(const ExactReal& x, bool strict) {
    if (x.kind() == ExactReal::Kind::NegInf) return -DBL_MAX;
    if (x.kind() == ExactReal::Kind::PosInf) return DBL_MAX;
    FpValue v = round_exact(x, FpFormat::binary64(), RoundingMode::TowardNegative);
    double d = std::bit_cast<double>(v.bits);
    if (std::isinf(d)) d = -DBL_MAX;
    if (strict && ExactReal::from_double(d) == x)
        d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return d;
}

}  // namespace

bool tighten_to_binary64(FunctionId f, long recon, const RoundingInterval& raw,
                         double& vlo, double& vhi) {
    // Interval endpoints are values (or midpoints) of narrow formats, so the
    // admissibility test runs in plain doubles, exactly.
    const double ld = raw.lower.is_finite() ? round_to_binary64(raw.lower)
                                            : (raw.lower.sign() > 0 ? HUGE_VAL : -HUGE_VAL);
    const double hd = raw.upper.is_finite() ? round_to_binary64(raw.upper)
                                            : (raw.upper.sign() > 0 ? HUGE_VAL : -HUGE_VAL);
    if (raw.lower.is_finite() && ExactReal::from_double(ld) != raw.lower)
        throw std::logic_error("tighten: interval endpoint not binary64-representable");
    if (raw.upper.is_finite() && ExactReal::from_double(hd) != raw.upper)
        throw std::logic_error("tighten: interval endpoint not binary64-representable");

    // The forward map is nondecreasing in v, so "below the interval" flips
    // from true to false once and "above" from false to true once; the
    // admissible band is what sits between the two flips.
    auto too_low = [&](double v) {
        const double y = output_compensate(f, v, recon);
        return raw.lower_open ? !(y > ld) : !(y >= ld);
    };
    auto too_high = [&](double v) {
        const double y = output_compensate(f, v, recon);
        return raw.upper_open ? !(y < hd) : !(y <= hd);
    };
    auto admissible = [&](double v) { return !too_low(v) && !too_high(v); };

    const std::uint64_t kmin = dkey(-DBL_MAX), kmax = dkey(DBL_MAX);
    if (too_low(dunkey(kmax))) return false;
    if (too_low(dunkey(kmin))) {
        std::uint64_t a = kmin, b = kmax;  // too_low(a), !too_low(b)
        while (b - a > 1) {
            const std::uint64_t m = a + (b - a) / 2;
            (too_low(dunkey(m)) ? a : b) = m;
        }
        vlo = dunkey(b);
    } else {
        vlo = dunkey(kmin);
    }
    if (too_high(vlo)) return false;  // the map skips straight past the interval
    if (too_high(dunkey(kmax))) {
        std::uint64_t a = dkey(vlo), b = kmax;  // !too_high(a), too_high(b)
        while (b - a > 1) {
            const std::uint64_t m = a + (b - a) / 2;
            (too_high(dunkey(m)) ? b : a) = m;
        }
        vhi = dunkey(a);
    } else {
        vhi = dunkey(kmax);
    }

    const ExactInterval ideal = invert_intervals(f, raw.lower, raw.upper, recon);
    vlo = std::max(vlo, ceil_to_double(ideal.lo, raw.lower_open));
    vhi = std::min(vhi, floor_to_double(ideal.hi, raw.upper_open));
    return vlo <= vhi && admissible(vlo) && admissible(vhi);
}

ConstraintSet build_progressive_constraints(FunctionId f,
                                            const std::vector<LadderRung>& ladder,
                                            int k_max) {
    if (ladder.empty()) throw std::invalid_argument("build: empty ladder");
    for (size_t j = 0; j + 1 < ladder.size(); ++j) {
        if (ladder[j].format.total_bits > ladder[j + 1].format.total_bits ||
            ladder[j].term_count > ladder[j + 1].term_count)
            throw std::invalid_argument("build: ladder must ascend in bitwidth and terms");
        if (ladder[j].format.exponent_bits != ladder[j + 1].format.exponent_bits)
            throw std::invalid_argument("build: ladder rungs must share exponent width");
    }
    for (const auto& r : ladder)
        if (r.term_count > k_max) throw std::invalid_argument("build: term count above k_max");

    ConstraintSet cs;
    cs.function = f;
    cs.ladder = ladder;
    cs.k_max = k_max;

    for (size_t j = 0; j < ladder.size(); ++j) {
        const LadderRung& rung = ladder[j];
        enumerate(rung.format, [&](FpValue x) {
            if (!x.is_finite() || x.is_zero()) return;
            if (is_log_family(f) && x.sign()) return;
            const double xd = decode_to_double(x);
            if (is_exp_family(f)) {
                // Inputs with huge scaled exponents are served by the runtime's
                // saturation paths; constraining them would blow up the
                // rational pullback for no benefit.
                const ConstantBracket& s = reduction_scale(f);
                const double t = s.trivial ? xd : xd * s.nearest;
                if (t > static_cast<double>(rung.interval_format.emax() + 2) ||
                    t < static_cast<double>(rung.interval_format.emin_sub() - 4)) {
                    ++cs.threshold_routed;
                    return;
                }
            }
            const ReducedInput red = range_reduce(f, xd);
            const OracleOutcome o =
                oracle_round(f, x, rung.interval_format, rung.interval_mode);
            if (o.status != OracleStatus::Ok)
                throw std::logic_error("build: oracle domain error on an in-domain input");
            const RoundingInterval raw = rounding_interval(o.result.value, rung.interval_mode);
            double vlo = 0, vhi = 0;
            if (!tighten_to_binary64(f, red.recon, raw, vlo, vhi)) {
                cs.forced_specials.push_back({x.bits, static_cast<int>(j)});
                return;
            }
            IntervalConstraint c;
            c.x = red.x_reduced;
            c.lo = vlo;
            c.hi = vhi;
            c.term_count = rung.term_count;
            c.sources.emplace_back(x.bits, static_cast<int>(j));
            cs.items.push_back(std::move(c));
        });
    }
    return cs;
}

void merge_duplicate_inputs(ConstraintSet& cs) {
    std::map<std::pair<std::uint64_t, int>, IntervalConstraint> merged;
    for (auto& c : cs.items) {
        const auto key = std::make_pair(std::bit_cast<std::uint64_t>(c.x), c.term_count);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, std::move(c));
            continue;
        }
        IntervalConstraint& m = it->second;
        m.lo = std::max(m.lo, c.lo);
        m.hi = std::min(m.hi, c.hi);
        m.weight = std::max(m.weight, c.weight);
        m.sources.insert(m.sources.end(), c.sources.begin(), c.sources.end());
    }
    cs.items.clear();
    for (auto& [key, c] : merged) {
        if (c.lo > c.hi) {
            cs.conflicts.push_back({c.x, c.term_count});
            continue;
        }
        cs.items.push_back(std::move(c));
    }
    // map iteration is keyed on (x bits, terms): canonical order for the LP
    std::sort(cs.items.begin(), cs.items.end(), [](const auto& a, const auto& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.term_count < b.term_count;
    });
}

void dump_constraints_jsonl(const ConstraintSet& cs, std::ostream& out) {
    char buf[256];
    for (const auto& c : cs.items) {
        std::snprintf(buf, sizeof buf,
                      "{\"x\":\"0x%016llX\",\"lo\":\"0x%016llX\",\"hi\":\"0x%016llX\","
                      "\"terms\":%d,\"weight\":%llu,\"sources\":%zu}",
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(c.x)),
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(c.lo)),
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(c.hi)),
                      c.term_count, static_cast<unsigned long long>(c.weight),
                      c.sources.size());
        out << buf << "\n";
    }
}

}  // namespace progpoly
