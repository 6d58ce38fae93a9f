#include "progpoly/generator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "progpoly/runtime.hpp"

namespace progpoly {

double unit_uniform(std::mt19937_64& rng) {
    // 53 random bits, offset half a step: lands strictly inside (0,1).
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

std::vector<std::uint32_t> weighted_random_sample(const ConstraintSet& cs,
                                                  std::size_t size,
                                                  std::mt19937_64& rng) {
    if (size > cs.items.size())
        throw std::invalid_argument("weighted_random_sample: size exceeds set");
    std::vector<std::pair<double, std::uint32_t>> keyed(cs.items.size());
    for (std::size_t i = 0; i < cs.items.size(); ++i) {
        const double u = unit_uniform(rng);
        const double key = std::pow(u, 1.0 / static_cast<double>(cs.items[i].weight));
        keyed[i] = {key, static_cast<std::uint32_t>(i)};
    }
    auto better = [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    };
    std::nth_element(keyed.begin(), keyed.begin() + size, keyed.end(), better);
    std::vector<std::uint32_t> out(size);
    for (std::size_t i = 0; i < size; ++i) out[i] = keyed[i].second;
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct SampleRow {
    double x, lo, hi;
    int term_count;
};

LpProblem to_lp(const std::vector<SampleRow>& rows, int k_max) {
    LpProblem p;
    p.unknowns = k_max;
    p.rows.reserve(rows.size());
    for (const auto& r : rows) {
        LpRow row;
        row.x = ExactReal::from_double(r.x);
        row.term_count = r.term_count;
        row.lower = ExactReal::from_double(r.lo);
        row.upper = ExactReal::from_double(r.hi);
        p.rows.push_back(std::move(row));
    }
    return p;
}

}  // namespace

SolveSampleResult solve_sample(const std::vector<std::uint32_t>& sample,
                               std::vector<IntervalConstraint>& items, int k_max,
                               int restriction_retries) {
    SolveSampleResult res;
    if (sample.empty()) throw std::invalid_argument("solve_sample: empty sample");

    std::vector<SampleRow> rows;
    rows.reserve(sample.size());
    for (std::uint32_t idx : sample) {
        const IntervalConstraint& c = items[idx];
        rows.push_back({c.x, c.lo, c.hi, c.term_count});
    }

    std::vector<double> coeffs;
    bool solved = false;
    for (int attempt = 0; attempt <= restriction_retries; ++attempt) {
        const LpSolution sol = lp_solve(to_lp(rows, k_max));
        if (sol.status != LpSolution::Status::Feasible) {
            if (attempt == 0) res.proof_infeasible = true;  // sample subset of M: certificate
            return res;
        }
        coeffs = coefficients_to_binary64(sol);
        // Re-evaluate in binary64 and pull violated endpoints inward. One ulp
        // of the endpoint alone can be far below the Horner rounding noise
        // (near-zero endpoints under full-scale coefficients), so the step is
        // at least the observed violation; retries then make real progress.
        bool any_violation = false, tightened = false;
        for (auto& r : rows) {
            if (r.lo == r.hi) {
                if (horner_eval(coeffs, r.term_count, r.x) != r.lo) any_violation = true;
                continue;  // nothing to restrict on a singleton
            }
            const double y = horner_eval(coeffs, r.term_count, r.x);
            if (y < r.lo) {
                any_violation = true;
                const double one = std::nextafter(r.lo, HUGE_VAL) - r.lo;
                const double target = std::min(r.hi, r.lo + std::max(one, (r.lo - y) + one));
                if (target > r.lo) {
                    r.lo = target;
                    tightened = true;
                }
            } else if (y > r.hi) {
                any_violation = true;
                const double one = r.hi - std::nextafter(r.hi, -HUGE_VAL);
                const double target = std::max(r.lo, r.hi - std::max(one, (y - r.hi) + one));
                if (target < r.hi) {
                    r.hi = target;
                    tightened = true;
                }
            }
        }
        if (!any_violation) {
            solved = true;
            break;
        }
        if (!tightened) return res;  // singleton rows cannot move: give up on the sample
    }
    if (!solved) return res;

    res.candidate_valid = true;
    res.coefficients = coeffs;

    // Full scan with per-constraint progressive truncation.
    for (std::uint32_t i = 0; i < items.size(); ++i) {
        const IntervalConstraint& c = items[i];
        const double y = horner_eval(res.coefficients, c.term_count, c.x);
        if (y >= c.lo && y <= c.hi) {
            res.w_s += c.weight;
        } else {
            res.w_v += c.weight;
            res.n_v += 1;
            res.violated.push_back(i);
        }
    }

    // Lucky test: w_v <= w_s / (3k - 1), evaluated exactly.
    const unsigned __int128 lhs =
        static_cast<unsigned __int128>(res.w_v) * (3 * static_cast<unsigned>(k_max) - 1);
    res.lucky = lhs <= static_cast<unsigned __int128>(res.w_s);
    if (res.lucky) {
        for (std::uint32_t i : res.violated) {
            if (items[i].weight > (1ULL << 62))
                throw std::overflow_error("constraint weight overflow");
            items[i].weight *= 2;
        }
    }
    return res;
}

CoreResult run_sampling_loop(std::vector<IntervalConstraint>& items, int k_max,
                             const GeneratorConfig& cfg, std::mt19937_64& rng,
                             std::vector<IterationTrace>* trace) {
    CoreResult out;
    if (items.empty()) throw std::invalid_argument("sampling loop: no constraints");
    ConstraintSet view;  // sampling needs only items + weights
    view.items = std::move(items);
    const std::size_t sample_size =
        std::min(view.items.size(),
                 static_cast<std::size_t>(cfg.sample_size_factor) *
                     static_cast<std::size_t>(k_max) * static_cast<std::size_t>(k_max));

    for (int it = 0; it < cfg.max_iterations; ++it) {
        const auto sample = weighted_random_sample(view, sample_size, rng);
        SolveSampleResult r =
            solve_sample(sample, view.items, k_max, cfg.interval_restriction_retries);
        ++out.iterations;
        if (r.lucky) ++out.lucky;
        if (trace) {
            IterationTrace t;
            t.iteration = out.iterations;
            t.lucky = r.lucky;
            t.sample_infeasible = !r.candidate_valid;
            t.violated_count = r.n_v;
            t.violated_weight = r.w_v;
            t.satisfied_weight = r.w_s;
            trace->push_back(t);
        }
        if (r.proof_infeasible) {
            out.proof_infeasible = true;
            break;
        }
        if (!r.candidate_valid) continue;
        if (r.n_v == 0 || r.n_v < static_cast<std::uint64_t>(cfg.special_case_limit)) {
            out.success = true;
            out.coefficients = std::move(r.coefficients);
            out.violated = std::move(r.violated);
            break;
        }
    }
    items = std::move(view.items);
    return out;
}

namespace {

// Relabel term counts from the rung schedule, then merge. Forced specials and
// conflicts are re-derived by the merge; weights restart at 1. Rows whose
// every originating input the evaluator serves through an exact structural
// path (powers of two for log2, x=1 for the log family, integer exp2 inputs)
// place no requirement on the polynomial and leave the working multiset.
ConstraintSet remerge(const ConstraintSet& master, const std::vector<int>& terms) {
    ConstraintSet cs = master;
    for (auto& c : cs.items) {
        if (c.sources.size() != 1)
            throw std::logic_error("remerge expects the unmerged master set");
        c.term_count = terms[static_cast<std::size_t>(c.sources[0].second)];
        c.weight = 1;
    }
    for (std::size_t j = 0; j < cs.ladder.size(); ++j)
        cs.ladder[j].term_count = terms[j];
    merge_duplicate_inputs(cs);
    std::erase_if(cs.items, [&](const IntervalConstraint& c) {
        for (auto [enc, rung] : c.sources)
            if (!structurally_covered(cs.function,
                                      cs.ladder[static_cast<std::size_t>(rung)].format, enc))
                return false;
        return true;
    });
    return cs;
}

std::vector<std::vector<int>> term_schedules(const std::vector<LadderRung>& ladder,
                                             int k_cap) {
    std::vector<int> init;
    for (const auto& r : ladder) init.push_back(r.term_count);
    std::vector<std::vector<int>> out;
    std::set<std::vector<int>> seen;
    const int top0 = init.back();
    for (int top = top0; top <= k_cap; ++top) {
        for (int bump = 0; bump < top; ++bump) {
            std::vector<int> s(init.size());
            for (std::size_t j = 0; j + 1 < init.size(); ++j)
                s[j] = std::min(init[j] + bump, top);
            s.back() = top;
            // keep nondecreasing in bitwidth
            bool ok = true;
            for (std::size_t j = 0; j + 1 < s.size(); ++j)
                if (s[j] > s[j + 1]) ok = false;
            if (ok && seen.insert(s).second) out.push_back(std::move(s));
        }
    }
    return out;
}

std::string schedule_str(const std::vector<int>& s, int parts) {
    std::string t = "K=(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) t += ",";
        t += std::to_string(s[i]);
    }
    t += ") subdomains=" + std::to_string(parts);
    return t;
}

// Partition split points: medians of the reduced inputs, recursively.
std::vector<double> split_points_for(const std::vector<IntervalConstraint>& items,
                                     int parts) {
    std::vector<double> xs;
    xs.reserve(items.size());
    for (const auto& c : items) xs.push_back(c.x);
    std::sort(xs.begin(), xs.end());
    std::vector<double> splits;
    if (parts >= 2) splits.push_back(xs[xs.size() / 2]);
    if (parts == 4) {
        splits.push_back(xs[xs.size() / 4]);
        splits.push_back(xs[3 * xs.size() / 4]);
    }
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    return splits;
}

int subdomain_of(double x, const std::vector<double>& splits) {
    int i = 0;
    for (double s : splits)
        if (x >= s) ++i;
    return i;
}

}  // namespace

void accept_special_cases(ProgressivePolynomial& poly, const ConstraintSet& cs,
                          const std::vector<const IntervalConstraint*>& violated) {
    for (const IntervalConstraint* c : violated) {
        for (const auto& [encoding, rung] : c->sources) {
            const LadderRung& r = cs.ladder[static_cast<std::size_t>(rung)];
            if (structurally_covered(cs.function, r.format, encoding)) continue;
            const FpValue input{r.format, encoding};
            const OracleOutcome o =
                oracle_round(cs.function, input, r.interval_format, r.interval_mode);
            if (o.status != OracleStatus::Ok)
                throw std::logic_error("special case on out-of-domain input");
            SpecialCase sc;
            sc.rung = rung;
            sc.encoding = encoding;
            sc.value = decode_to_double(o.result.value);
            poly.special_cases.push_back(sc);
        }
    }
    std::sort(poly.special_cases.begin(), poly.special_cases.end(),
              [](const SpecialCase& a, const SpecialCase& b) {
                  if (a.rung != b.rung) return a.rung < b.rung;
                  return a.encoding < b.encoding;
              });
}

std::pair<ProgressivePolynomial, GenerationReport> generate(const GeneratorConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    GenerationReport rep;
    ProgressivePolynomial poly;
    poly.function = cfg.function;

    if (cfg.ladder.empty()) throw std::invalid_argument("generate: empty ladder");
    if (cfg.max_subdomains != 1 && cfg.max_subdomains != 2 && cfg.max_subdomains != 4)
        throw std::invalid_argument("generate: max_subdomains must be 1, 2 or 4");

    ConstraintSet master =
        build_progressive_constraints(cfg.function, cfg.ladder, cfg.k_max);

    {  // conflicts are visible before any sampling: merge a throwaway copy
        ConstraintSet probe = master;
        merge_duplicate_inputs(probe);
        if (!probe.conflicts.empty()) {
            rep.failure_reason = "conflicting constraints at " +
                                 std::to_string(probe.conflicts.size()) +
                                 " reduced inputs";
            return {poly, rep};
        }
    }

    std::mt19937_64 rng(cfg.rng_seed);
    const auto schedules = term_schedules(cfg.ladder, cfg.k_max);

    for (int parts = 1; parts <= cfg.max_subdomains; parts *= 2) {
        for (const auto& terms : schedules) {
            rep.attempts.push_back(schedule_str(terms, parts));
            ConstraintSet merged = remerge(master, terms);
            const int k_now = terms.back();

            const auto splits = split_points_for(merged.items, parts);
            if (static_cast<int>(splits.size()) + 1 != parts) continue;  // degenerate split
            std::vector<std::vector<IntervalConstraint>> partition(
                static_cast<std::size_t>(parts));
            for (auto& c : merged.items)
                partition[static_cast<std::size_t>(subdomain_of(c.x, splits))].push_back(
                    std::move(c));
            bool any_empty = false;
            for (const auto& p : partition) any_empty |= p.empty();
            if (any_empty) continue;

            std::vector<SubdomainPoly> polys;
            std::vector<const IntervalConstraint*> all_violated;
            std::vector<std::vector<IntervalConstraint>> kept(partition.size());
            rep.violated_per_subdomain.clear();
            rep.final_violated = 0;
            bool all_ok = true;
            for (std::size_t d = 0; d < partition.size(); ++d) {
                CoreResult r =
                    run_sampling_loop(partition[d], k_now, cfg, rng, &rep.trace);
                rep.iterations_used += r.iterations;
                rep.lucky_count += r.lucky;
                if (!r.success) {
                    all_ok = false;
                    break;
                }
                rep.violated_per_subdomain.push_back(r.violated.size());
                SubdomainPoly sp;
                sp.lo = d == 0 ? -HUGE_VAL : splits[d - 1];
                sp.hi = d == partition.size() - 1 ? HUGE_VAL : splits[d];
                sp.coefficients = std::move(r.coefficients);
                sp.coefficients.resize(static_cast<std::size_t>(k_now), 0.0);
                polys.push_back(std::move(sp));
                rep.final_violated += r.violated.size();
                kept[d] = std::move(partition[d]);
                for (std::uint32_t idx : r.violated) all_violated.push_back(&kept[d][idx]);
            }
            if (!all_ok) continue;

            poly.ladder = merged.ladder;
            poly.k_max = k_now;
            poly.exponents.clear();
            for (int i = 0; i < k_now; ++i) poly.exponents.push_back(i);
            poly.split_points = splits;
            poly.subdomains = std::move(polys);
            poly.special_cases.clear();
            accept_special_cases(poly, merged, all_violated);
            // Forced specials from the build join the table as well.
            std::vector<const IntervalConstraint*> none;
            for (const auto& fsp : master.forced_specials) {
                const LadderRung& r = merged.ladder[static_cast<std::size_t>(fsp.rung)];
                if (structurally_covered(cfg.function, r.format, fsp.encoding)) continue;
                const FpValue input{r.format, fsp.encoding};
                const OracleOutcome o =
                    oracle_round(cfg.function, input, r.interval_format, r.interval_mode);
                SpecialCase sc;
                sc.rung = fsp.rung;
                sc.encoding = fsp.encoding;
                sc.value = decode_to_double(o.result.value);
                poly.special_cases.push_back(sc);
            }
            std::sort(poly.special_cases.begin(), poly.special_cases.end(),
                      [](const SpecialCase& a, const SpecialCase& b) {
                          if (a.rung != b.rung) return a.rung < b.rung;
                          return a.encoding < b.encoding;
                      });

            // Closing assertion: everything not special-cased is satisfied.
            std::set<const IntervalConstraint*> excused(all_violated.begin(),
                                                        all_violated.end());
            for (std::size_t d = 0; d < kept.size(); ++d) {
                for (const auto& c : kept[d]) {
                    if (excused.count(&c)) continue;
                    const double y = horner_eval(poly.subdomains[d].coefficients,
                                                 c.term_count, c.x);
                    if (!(y >= c.lo && y <= c.hi))
                        throw std::logic_error("returned polynomial violates an "
                                               "unexcused constraint");
                }
            }

            rep.success = true;
            rep.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            return {poly, rep};
        }
    }

    rep.failure_reason = "escalation exhausted at " +
                         (rep.attempts.empty() ? std::string("(none)")
                                               : rep.attempts.back());
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {poly, rep};
}

}  // namespace progpoly
