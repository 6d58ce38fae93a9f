#include "progpoly/runtime.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace progpoly {

double horner_eval(std::span<const double> coeffs, int terms, double x) {
    if (terms < 1 || terms > static_cast<int>(coeffs.size()))
        throw std::invalid_argument("horner_eval: bad term count");
    double acc = coeffs[static_cast<std::size_t>(terms - 1)];
    for (int i = terms - 2; i >= 0; --i) acc = acc * x + coeffs[static_cast<std::size_t>(i)];
    return acc;
}

int CompiledFunction::rung_for(FpFormat out) const {
    for (std::size_t j = 0; j < poly.ladder.size(); ++j)
        if (poly.ladder[j].format.total_bits >= out.total_bits) return static_cast<int>(j);
    throw std::invalid_argument("no ladder rung covers " + out.spelling());
}

int CompiledFunction::terms_for(FpFormat out) const {
    return poly.ladder[static_cast<std::size_t>(rung_for(out))].term_count;
}

bool CompiledFunction::operator==(const CompiledFunction& o) const {
    auto dbits = [](double d) { return std::bit_cast<std::uint64_t>(d); };
    const ProgressivePolynomial &a = poly, &b = o.poly;
    if (a.function != b.function || a.k_max != b.k_max || a.exponents != b.exponents)
        return false;
    if (a.ladder.size() != b.ladder.size() || a.subdomains.size() != b.subdomains.size() ||
        a.split_points.size() != b.split_points.size() ||
        a.special_cases.size() != b.special_cases.size())
        return false;
    for (std::size_t i = 0; i < a.ladder.size(); ++i) {
        if (!(a.ladder[i].format == b.ladder[i].format) ||
            a.ladder[i].term_count != b.ladder[i].term_count ||
            a.ladder[i].interval_mode != b.ladder[i].interval_mode ||
            !(a.ladder[i].interval_format == b.ladder[i].interval_format))
            return false;
    }
    for (std::size_t i = 0; i < a.split_points.size(); ++i)
        if (dbits(a.split_points[i]) != dbits(b.split_points[i])) return false;
    for (std::size_t i = 0; i < a.subdomains.size(); ++i) {
        if (a.subdomains[i].coefficients.size() != b.subdomains[i].coefficients.size())
            return false;
        for (std::size_t j = 0; j < a.subdomains[i].coefficients.size(); ++j)
            if (dbits(a.subdomains[i].coefficients[j]) !=
                dbits(b.subdomains[i].coefficients[j]))
                return false;
    }
    for (std::size_t i = 0; i < a.special_cases.size(); ++i) {
        if (a.special_cases[i].rung != b.special_cases[i].rung ||
            a.special_cases[i].encoding != b.special_cases[i].encoding ||
            dbits(a.special_cases[i].value) != dbits(b.special_cases[i].value))
            return false;
    }
    return true;
}

CompiledFunction compile(ProgressivePolynomial poly) {
    if (poly.ladder.empty()) throw std::invalid_argument("compile: empty ladder");
    if (poly.subdomains.empty()) throw std::invalid_argument("compile: no subdomains");
    if (poly.subdomains.size() != poly.split_points.size() + 1)
        throw std::invalid_argument("compile: split points do not match subdomains");
    for (std::size_t i = 0; i < poly.exponents.size(); ++i)
        if (poly.exponents[i] != static_cast<int>(i))
            throw std::invalid_argument("compile: only the dense schedule is supported");
    int prev_terms = 0;
    std::uint8_t ebits = poly.ladder.front().format.exponent_bits;
    for (const auto& r : poly.ladder) {
        if (r.term_count < prev_terms || r.term_count > poly.k_max)
            throw std::invalid_argument("compile: term counts must be nondecreasing");
        if (r.format.exponent_bits != ebits)
            throw std::invalid_argument("compile: rungs must share exponent width");
        prev_terms = r.term_count;
    }
    for (const auto& sd : poly.subdomains)
        if (static_cast<int>(sd.coefficients.size()) != poly.k_max)
            throw std::invalid_argument("compile: coefficient vector length mismatch");

    CompiledFunction cf;
    cf.poly = std::move(poly);
    cf.special_lookup.reserve(cf.poly.special_cases.size());
    for (const auto& sc : cf.poly.special_cases)
        cf.special_lookup.emplace_back(
            (static_cast<std::uint64_t>(sc.rung) << 32) | sc.encoding, sc.value);
    std::sort(cf.special_lookup.begin(), cf.special_lookup.end());
    return cf;
}

bool structurally_covered(FunctionId f, FpFormat fmt, std::uint64_t encoding) {
    const FpValue v{fmt, encoding};
    if (!v.is_finite() || v.is_zero()) return false;
    switch (f) {
        case FunctionId::Ln:
        case FunctionId::Log10:
            return !v.sign() && decode_to_double(v) == 1.0;
        case FunctionId::Log2: {
            if (v.sign()) return false;
            if (v.exponent_field() != 0) return v.mantissa_field() == 0;
            return std::has_single_bit(v.mantissa_field());
        }
        case FunctionId::Exp2: {
            const double t = decode_to_double(v);
            return t == std::floor(t) && std::abs(t) < 0x1p31;
        }
        case FunctionId::Exp10: {
            const double t = decode_to_double(v);
            return t == std::floor(t) && t >= 0 && t <= 22;
        }
        case FunctionId::Exp: return false;
    }
    return false;
}

namespace {

// Exact powers of ten up to 10^22: all representable in binary64.
double pow10_exact(int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= 10.0;
    return v;
}

FpValue structural_result(FunctionId f, FpValue x, FpFormat out, RoundingMode mode) {
    switch (f) {
        case FunctionId::Ln:
        case FunctionId::Log10: return pos_zero(out);  // x == 1
        case FunctionId::Log2: {
            long k;
            if (x.exponent_field() != 0)
                k = static_cast<long>(x.exponent_field()) - x.format.bias();
            else
                k = x.format.emin_sub() +
                    static_cast<long>(std::countr_zero(x.mantissa_field()));
            return round_exact(ExactReal(k), out, mode);
        }
        case FunctionId::Exp2: {
            const double t = decode_to_double(x);
            return round_exact(ExactReal::pow2(static_cast<long>(t)), out, mode);
        }
        case FunctionId::Exp10: {
            const int k = static_cast<int>(decode_to_double(x));
            return round_exact(ExactReal::from_double(pow10_exact(k)), out, mode);
        }
        default: throw std::logic_error("structural_result: not covered");
    }
}

}  // namespace

FpValue evaluate(const CompiledFunction& cf, FpValue x, FpFormat out, RoundingMode mode) {
    if (!(x.format == out))
        throw std::invalid_argument("evaluate: input must be encoded in the output format");
    const FpFormat largest = cf.poly.ladder.back().format;
    if (out.exponent_bits != largest.exponent_bits ||
        out.total_bits > largest.total_bits ||
        out.total_bits < static_cast<int>(out.exponent_bits) + 2)
        throw std::invalid_argument("evaluate: unsupported output format " + out.spelling());

    const FunctionId f = cf.poly.function;
    if (auto sp = special_value_result(f, x, out, mode)) return *sp;
    if (is_exp_family(f)) {
        if (auto sat = exp_saturation_result(f, decode(x), out, mode)) return *sat;
    }
    if (structurally_covered(f, out, x.bits)) return structural_result(f, x, out, mode);

    const int rung = cf.rung_for(out);
    const FpFormat rung_fmt = cf.poly.ladder[static_cast<std::size_t>(rung)].format;
    const double xd = decode_to_double(x);
    if (!cf.special_lookup.empty()) {
        const FpValue re = value_from_double(xd, rung_fmt);
        const std::uint64_t key = (static_cast<std::uint64_t>(rung) << 32) | re.bits;
        const auto it = std::lower_bound(
            cf.special_lookup.begin(), cf.special_lookup.end(), key,
            [](const auto& kv, std::uint64_t k) { return kv.first < k; });
        if (it != cf.special_lookup.end() && it->first == key)
            return round_exact(ExactReal::from_double(it->second), out, mode);
    }

    const ReducedInput red = range_reduce(f, xd);
    std::size_t d = 0;
    for (double s : cf.poly.split_points)
        if (red.x_reduced >= s) ++d;
    const double p = horner_eval(cf.poly.subdomains[d].coefficients,
                                 cf.poly.ladder[static_cast<std::size_t>(rung)].term_count,
                                 red.x_reduced);
    const double y = output_compensate(f, p, red.recon);
    return round_exact(ExactReal::from_double(y), out, mode);
}

int multiply_add_count(const CompiledFunction& cf, FpFormat out) {
    return cf.terms_for(out) - 1;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llX", static_cast<unsigned long long>(v));
    return buf;
}

std::string hex_double(double d) { return hex64(std::bit_cast<std::uint64_t>(d)); }

std::uint64_t parse_hex64(const std::string& s) {
    if (s.rfind("0x", 0) != 0) throw std::invalid_argument("expected 0x-hex: " + s);
    return std::stoull(s.substr(2), nullptr, 16);
}

double parse_hex_double(const std::string& s) {
    return std::bit_cast<double>(parse_hex64(s));
}

nlohmann::ordered_json to_json_body(const CompiledFunction& cf) {
    using json = nlohmann::ordered_json;
    const ProgressivePolynomial& p = cf.poly;
    json j;
    j["schema"] = "progpoly-artifact";
    j["version"] = 1;
    j["function"] = to_string(p.function);
    j["k_max"] = p.k_max;
    j["exponent_schedule"] = "dense";
    j["ladder"] = json::array();
    for (const auto& r : p.ladder) {
        json rj;
        rj["format"] = r.format.spelling();
        rj["terms"] = r.term_count;
        rj["interval_mode"] = to_string(r.interval_mode);
        rj["interval_format"] = r.interval_format.spelling();
        j["ladder"].push_back(rj);
    }
    j["split_points"] = json::array();
    for (double s : p.split_points) j["split_points"].push_back(hex_double(s));
    j["subdomains"] = json::array();
    for (const auto& sd : p.subdomains) {
        json c = json::array();
        for (double v : sd.coefficients) c.push_back(hex_double(v));
        json sj;
        sj["coefficients"] = c;
        j["subdomains"].push_back(sj);
    }
    j["special_cases"] = json::array();
    for (const auto& sc : p.special_cases) {
        json s;
        s["rung"] = sc.rung;
        s["input"] = hex64(sc.encoding);
        s["value"] = hex_double(sc.value);
        j["special_cases"].push_back(s);
    }
    return j;
}

}  // namespace

std::string export_json(const CompiledFunction& cf) {
    nlohmann::ordered_json j = to_json_body(cf);
    j["checksum"] = hex64(fnv1a(j.dump()));
    return j.dump();
}

CompiledFunction load_json(const std::string& text) {
    using json = nlohmann::ordered_json;
    json j = json::parse(text);
    if (j.value("schema", "") != std::string("progpoly-artifact"))
        throw std::invalid_argument("load: not a progpoly artifact");
    if (j.value("version", 0) != 1) throw std::invalid_argument("load: unknown version");
    const std::string checksum = j.at("checksum").get<std::string>();
    j.erase("checksum");
    if (hex64(fnv1a(j.dump())) != checksum)
        throw std::invalid_argument("load: checksum mismatch");

    ProgressivePolynomial p;
    p.function = parse_function(j.at("function").get<std::string>());
    p.k_max = j.at("k_max").get<int>();
    if (j.at("exponent_schedule").get<std::string>() != "dense")
        throw std::invalid_argument("load: only the dense schedule is supported");
    for (int i = 0; i < p.k_max; ++i) p.exponents.push_back(i);
    for (const auto& rj : j.at("ladder")) {
        LadderRung r;
        r.format = parse_format(rj.at("format").get<std::string>());
        r.term_count = rj.at("terms").get<int>();
        r.interval_mode = parse_rounding_mode(rj.at("interval_mode").get<std::string>());
        r.interval_format = parse_format(rj.at("interval_format").get<std::string>());
        p.ladder.push_back(r);
    }
    for (const auto& s : j.at("split_points"))
        p.split_points.push_back(parse_hex_double(s.get<std::string>()));
    for (const auto& sj : j.at("subdomains")) {
        SubdomainPoly sd;
        for (const auto& c : sj.at("coefficients"))
            sd.coefficients.push_back(parse_hex_double(c.get<std::string>()));
        sd.lo = p.subdomains.empty() ? -HUGE_VAL
                                     : p.split_points.at(p.subdomains.size() - 1);
        p.subdomains.push_back(std::move(sd));
    }
    for (std::size_t i = 0; i < p.subdomains.size(); ++i)
        p.subdomains[i].hi =
            i + 1 < p.subdomains.size() ? p.split_points.at(i) : HUGE_VAL;
    for (const auto& s : j.at("special_cases")) {
        SpecialCase sc;
        sc.rung = s.at("rung").get<int>();
        sc.encoding = parse_hex64(s.at("input").get<std::string>());
        sc.value = parse_hex_double(s.at("value").get<std::string>());
        p.special_cases.push_back(sc);
    }
    return compile(std::move(p));
}

std::string emit_source(const CompiledFunction& cf) {
    const ProgressivePolynomial& p = cf.poly;
    std::string s;
    s += "// Generated progressive polynomial table for " +
         std::string(to_string(p.function)) + ".\n";
    s += "// Reduced-domain kernel: evaluate with the per-format term count,\n";
    s += "// plain double Horner, no fused multiply-add.\n";
    s += "#include <cstdint>\n\n";
    s += "namespace progpoly_gen {\n\n";
    s += "inline constexpr int kTermCounts[] = {";
    for (std::size_t i = 0; i < p.ladder.size(); ++i)
        s += (i ? ", " : "") + std::to_string(p.ladder[i].term_count);
    s += "};  //";
    for (const auto& r : p.ladder) s += " " + r.format.spelling();
    s += "\n";
    s += "inline constexpr int kMaxTerms = " + std::to_string(p.k_max) + ";\n";
    s += "inline constexpr double kSplitPoints[] = {";
    if (p.split_points.empty()) s += "/* single domain */";
    for (std::size_t i = 0; i < p.split_points.size(); ++i)
        s += (i ? ", " : "") + hex_double(p.split_points[i]) + " /* bits */";
    s += "};\n";
    s += "inline constexpr std::uint64_t kCoefficientBits[][" +
         std::to_string(p.k_max) + "] = {\n";
    for (const auto& sd : p.subdomains) {
        s += "    {";
        for (std::size_t i = 0; i < sd.coefficients.size(); ++i)
            s += (i ? ", " : "") + hex64(std::bit_cast<std::uint64_t>(sd.coefficients[i]));
        s += "},\n";
    }
    s += "};\n\n";
    s += "inline double horner(const double* c, int terms, double x) {\n";
    s += "    double acc = c[terms - 1];\n";
    s += "    for (int i = terms - 2; i >= 0; --i) acc = acc * x + c[i];\n";
    s += "    return acc;\n";
    s += "}\n\n";
    s += "}  // namespace progpoly_gen\n";
    return s;
}

}  // namespace progpoly
