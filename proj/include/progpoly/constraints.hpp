#ifndef PROGPOLY_CONSTRAINTS_HPP
#define PROGPOLY_CONSTRAINTS_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "progpoly/formats.hpp"
#include "progpoly/function_id.hpp"
#include "progpoly/oracle.hpp"
#include "progpoly/reduction.hpp"

namespace progpoly {

/// The exact set of reals that round to a given value under (format, mode).
struct RoundingInterval {
    ExactReal lower, upper;
    bool lower_open = false;
    bool upper_open = false;
};

RoundingInterval rounding_interval(FpValue y, RoundingMode mode,
                                   OddOverflow odd_overflow = OddOverflow::SaturateToLargestOdd);

/// One rung of the format ladder the progressive polynomial serves.
struct LadderRung {
    FpFormat format;
    int term_count = 1;
    RoundingMode interval_mode = RoundingMode::ToOdd;
    FpFormat interval_format;  // default: F(n+2, |E|) for the ro mode

    static LadderRung ro_rung(FpFormat fmt, int terms);
    static LadderRung rn_rung(FpFormat fmt, int terms);  // rn-only fallback
};

/// One weighted progressive constraint: P evaluated with `term_count` terms
/// at the reduced input x must land in [lo, hi] (closed, binary64 endpoints).
struct IntervalConstraint {
    double x = 0;
    double lo = 0;
    double hi = 0;
    int term_count = 1;
    std::uint64_t weight = 1;
    std::vector<std::pair<std::uint64_t, int>> sources;  // (input encoding, rung index)
};

struct ConstraintSet {
    FunctionId function = FunctionId::Log2;
    std::vector<LadderRung> ladder;
    int k_max = 1;
    std::vector<IntervalConstraint> items;

    struct ForcedSpecial {  // empty interval after tightening
        std::uint64_t encoding = 0;
        int rung = 0;
    };
    std::vector<ForcedSpecial> forced_specials;

    struct Conflict {  // disjoint intersection at equal (x, term_count)
        double x = 0;
        int term_count = 0;
    };
    std::vector<Conflict> conflicts;

    std::uint64_t threshold_routed = 0;  // exp inputs served by saturation paths

    std::uint64_t weight_sum() const;
};

/// Builds the full weighted constraint set for a ladder: every finite
/// in-domain input of every rung contributes one constraint (or a forced
/// special case when its tightened interval is empty).
ConstraintSet build_progressive_constraints(FunctionId f,
                                            const std::vector<LadderRung>& ladder,
                                            int k_max);

/// Intersects constraints sharing (x, term_count); disjoint intersections
/// are recorded as conflicts and removed. Weights combine as the maximum.
void merge_duplicate_inputs(ConstraintSet& cs);

/// JSON-lines dump, one constraint per line, binary64 fields hex-encoded.
void dump_constraints_jsonl(const ConstraintSet& cs, std::ostream& out);

/// Largest closed binary64 interval [vlo, vhi] whose forward compensation
/// stays inside the (possibly open) exact interval, intersected with the
/// ideal pullback. Returns false when empty.
bool tighten_to_binary64(FunctionId f, long recon, const RoundingInterval& raw,
                         double& vlo, double& vhi);

}  // namespace progpoly

#endif
