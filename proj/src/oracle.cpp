#include "progpoly/oracle.hpp"

#include <cstdio>
#include <fstream>

#include "progpoly/function_brackets.hpp"

namespace progpoly {

std::optional<FpValue> special_value_result(FunctionId f, FpValue x, FpFormat out,
                                            RoundingMode mode) {
    if (x.is_nan()) return quiet_nan(out);
    if (is_log_family(f)) {
        if (x.is_zero()) return neg_inf(out);  // pole
        if (x.sign()) return quiet_nan(out);   // negative, including -inf
        if (x.is_inf()) return pos_inf(out);
        return std::nullopt;
    }
    // exp family
    if (x.is_inf()) return x.sign() ? pos_zero(out) : pos_inf(out);
    if (x.is_zero()) return round_exact(ExactReal(1L), out, mode);
    return std::nullopt;
}

namespace {

// f(x) is rational exactly in these number-theoretic cases; everything else
// in the supported families is irrational, so a bracket always separates.
std::optional<ExactReal> exact_result(FunctionId f, const ExactReal& x) {
    const mpq_class& q = x.rational();
    switch (f) {
        case FunctionId::Log2: {
            // log2 is rational iff x is a power of two.
            const mpz_class& num = q.get_num();
            const mpz_class& den = q.get_den();
            if (den == 1) {
                const auto bit = mpz_scan1(num.get_mpz_t(), 0);
                if ((mpz_class(1) << bit) == num) return ExactReal(static_cast<long>(bit));
            } else if (num == 1) {
                const auto bit = mpz_scan1(den.get_mpz_t(), 0);
                if ((mpz_class(1) << bit) == den) return ExactReal(-static_cast<long>(bit));
            }
            return std::nullopt;
        }
        case FunctionId::Ln:
            if (q == 1) return ExactReal(0L);
            return std::nullopt;
        case FunctionId::Log10: {
            // Inputs are dyadic, so only 10^k with k >= 0 can appear.
            if (q == 1) return ExactReal(0L);
            if (q.get_den() != 1 || q < 1) return std::nullopt;
            mpz_class n = q.get_num();
            long k = 0;
            while (n % 10 == 0) {
                n /= 10;
                ++k;
            }
            if (n == 1 && k > 0) return ExactReal(k);
            return std::nullopt;
        }
        case FunctionId::Exp2:
            if (x.is_integer() && x.abs() <= ExactReal(1L << 26))
                return ExactReal::pow2(x.to_integer().get_si());
            return std::nullopt;
        case FunctionId::Exp:
            return std::nullopt;  // exp(0) handled as a special value
        case FunctionId::Exp10: {
            if (!x.is_integer() || x.abs() > ExactReal(1L << 20)) return std::nullopt;
            const long k = x.to_integer().get_si();
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k < 0 ? -k : k));
            return k >= 0 ? ExactReal(p, mpz_class(1)) : ExactReal(mpz_class(1), p);
        }
    }
    return std::nullopt;
}

// Certain overflow/underflow for the exp family, decided with exact rational
// comparisons wide enough that every rounding mode agrees with a proxy value.
enum class Saturation { None, Overflow, Underflow };

Saturation exp_saturation(FunctionId f, const ExactReal& x, FpFormat out) {
    const ExactReal up(out.emax() + 1);
    const ExactReal down(out.emin_sub() - 1);
    switch (f) {
        case FunctionId::Exp:  // ln2 < 1 < log2(e)
        case FunctionId::Exp2:
            if (x >= up) return Saturation::Overflow;
            if (x <= down) return Saturation::Underflow;
            return Saturation::None;
        case FunctionId::Exp10:  // 3 < log2(10) < 4
            if (x * ExactReal(3L) >= up) return Saturation::Overflow;
            if (x * ExactReal(3L) <= down) return Saturation::Underflow;
            return Saturation::None;
        default: return Saturation::None;
    }
}

OracleResult rounded(const ExactReal& v, FpFormat out, RoundingMode mode) {
    const FpValue r = round_exact(v, out, mode);
    return OracleResult{r, decode(r) == v};
}

}  // namespace

std::optional<FpValue> exp_saturation_result(FunctionId f, const ExactReal& x,
                                             FpFormat out, RoundingMode mode) {
    if (!is_exp_family(f) || !x.is_finite()) return std::nullopt;
    switch (exp_saturation(f, x, out)) {
        case Saturation::Overflow:
            return round_exact(ExactReal::pow2(out.emax() + 2), out, mode);
        case Saturation::Underflow:
            return round_exact(ExactReal::pow2(out.emin_sub() - 2), out, mode);
        default: return std::nullopt;
    }
}

std::vector<OracleOutcome> oracle_round_many(FunctionId f, FpValue x, FpFormat out,
                                             std::span<const RoundingMode> modes) {
    std::vector<OracleOutcome> res(modes.size());
    if (!x.is_finite()) throw std::invalid_argument("oracle_round: non-finite input");
    const ExactReal q = decode(x);
    if (is_log_family(f) && q.sign() <= 0) {
        for (auto& r : res) r.status = OracleStatus::DomainError;
        return res;
    }
    if (is_exp_family(f) && q.is_zero()) {
        for (size_t i = 0; i < modes.size(); ++i) res[i].result = rounded(ExactReal(1L), out, modes[i]);
        return res;
    }

    if (is_exp_family(f) && exp_saturation(f, q, out) != Saturation::None) {
        for (size_t i = 0; i < modes.size(); ++i) {
            res[i].result = OracleResult{*exp_saturation_result(f, q, out, modes[i]), false};
        }
        return res;
    }

    if (auto ex = exact_result(f, q)) {
        for (size_t i = 0; i < modes.size(); ++i) res[i].result = rounded(*ex, out, modes[i]);
        return res;
    }

    for (long p : kOraclePrecisionLadder) {
        const DyadicInterval b = function_bracket(f, q.rational(), p);
        const ExactReal lo = b.lo_exact();
        const ExactReal hi = b.hi_exact();
        bool all_ok = true;
        for (size_t i = 0; i < modes.size(); ++i) {
            const FpValue vlo = round_exact(lo, out, modes[i]);
            const FpValue vhi = round_exact(hi, out, modes[i]);
            if (vlo.bits != vhi.bits) {
                all_ok = false;
                break;
            }
            res[i].result = OracleResult{vlo, false};
        }
        if (all_ok) return res;
    }
    throw PrecisionExhausted("oracle: cannot disambiguate " + std::string(to_string(f)) +
                             " at input encoding " + std::to_string(x.bits) + " of " +
                             x.format.spelling() + " into " + out.spelling());
}

OracleOutcome oracle_round(FunctionId f, FpValue x, FpFormat out, RoundingMode mode) {
    const RoundingMode m[] = {mode};
    return oracle_round_many(f, x, out, m)[0];
}

void oracle_table(FunctionId f, FpFormat fmt, RoundingMode mode,
                  const std::function<void(FpValue, OracleResult)>& fn) {
    enumerate(fmt, [&](FpValue v) {
        if (auto sp = special_value_result(f, v, fmt, mode)) {
            fn(v, OracleResult{*sp, true});
            return;
        }
        const OracleOutcome o = oracle_round(f, v, fmt, mode);
        fn(v, o.result);
    });
}

std::string oracle_cache_filename(FunctionId f, FpFormat fmt, RoundingMode mode) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s_fp%u_%u_%s_v%d.oc", to_string(f), fmt.total_bits,
                  fmt.exponent_bits, to_string(mode), kOracleVersion);
    return buf;
}

namespace {

void put_le(std::ofstream& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

bool get_le(std::ifstream& in, int bytes, std::uint64_t& v) {
    v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == EOF) return false;
        v |= static_cast<std::uint64_t>(c & 0xFF) << (8 * i);
    }
    return true;
}

}  // namespace

void write_oracle_cache(const std::string& path, FunctionId f, FpFormat fmt,
                        RoundingMode mode, const std::vector<std::uint64_t>& outputs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write oracle cache: " + path);
    out.write("PPOC", 4);
    out.put(static_cast<char>(kOracleVersion));
    out.put(static_cast<char>(f));
    out.put(static_cast<char>(mode));
    out.put(static_cast<char>(fmt.total_bits));
    out.put(static_cast<char>(fmt.exponent_bits));
    const int bytes = (fmt.total_bits + 7) / 8;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        put_le(out, i, bytes);
        put_le(out, outputs[i], bytes);
    }
}

std::optional<std::vector<std::uint64_t>> read_oracle_cache(const std::string& path,
                                                            FunctionId f, FpFormat fmt,
                                                            RoundingMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != "PPOC") return std::nullopt;
    if (in.get() != kOracleVersion) return std::nullopt;
    if (in.get() != static_cast<int>(f)) return std::nullopt;
    if (in.get() != static_cast<int>(mode)) return std::nullopt;
    if (in.get() != fmt.total_bits || in.get() != fmt.exponent_bits) return std::nullopt;
    const int bytes = (fmt.total_bits + 7) / 8;
    const std::uint64_t count = fmt.encoding_count_minus_one() + 1;
    std::vector<std::uint64_t> out(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t key = 0, val = 0;
        if (!get_le(in, bytes, key) || !get_le(in, bytes, val) || key != i)
            return std::nullopt;
        out[i] = val;
    }
    return out;
}

}  // namespace progpoly
