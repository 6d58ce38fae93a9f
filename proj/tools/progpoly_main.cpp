#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "toml_lite.hpp"

#include "progpoly/generator.hpp"
#include "progpoly/validator.hpp"

using namespace progpoly;
using json = nlohmann::ordered_json;

namespace {

GeneratorConfig config_from_file(const std::string& path) {
    const auto doc = tomllite::parse_file(path);
    GeneratorConfig cfg;
    cfg.function = parse_function(doc.root.get_str("function", "log2"));
    cfg.rng_seed = static_cast<std::uint64_t>(doc.root.get_int("rng_seed", 1));
    cfg.k_max = static_cast<int>(doc.root.get_int("k_max", 8));
    cfg.max_iterations = static_cast<int>(doc.root.get_int("max_iterations", 1000));
    cfg.special_case_limit = static_cast<int>(doc.root.get_int("special_case_limit", 4));
    cfg.max_subdomains = static_cast<int>(doc.root.get_int("max_subdomains", 4));
    cfg.sample_size_factor = static_cast<int>(doc.root.get_int("sample_size_factor", 6));
    cfg.interval_restriction_retries =
        static_cast<int>(doc.root.get_int("interval_restriction_retries", 8));
    auto it = doc.table_arrays.find("ladder");
    if (it == doc.table_arrays.end() || it->second.empty())
        throw std::invalid_argument("config: at least one [[ladder]] entry is required");
    for (const auto& t : it->second) {
        const FpFormat fmt = parse_format(t.get_str("format", ""));
        const int terms = static_cast<int>(t.get_int("terms", 1));
        const std::string mode = t.get_str("interval_mode", "ro");
        LadderRung rung = mode == "rn" ? LadderRung::rn_rung(fmt, terms)
                                       : LadderRung::ro_rung(fmt, terms);
        if (t.has("interval_bits"))
            rung.interval_format = FpFormat::make(
                static_cast<int>(t.get_int("interval_bits", 0)), fmt.exponent_bits);
        cfg.ladder.push_back(rung);
    }
    return cfg;
}

json report_to_json(const GenerationReport& rep) {
    json j;
    j["success"] = rep.success;
    j["iterations_used"] = rep.iterations_used;
    j["lucky_count"] = rep.lucky_count;
    j["final_violated"] = rep.final_violated;
    j["violated_per_subdomain"] = rep.violated_per_subdomain;
    j["wall_seconds"] = rep.wall_seconds;
    j["attempts"] = rep.attempts;
    if (!rep.failure_reason.empty()) j["failure_reason"] = rep.failure_reason;
    json trace = json::array();
    for (const auto& t : rep.trace) {
        json e;
        e["iteration"] = t.iteration;
        e["lucky"] = t.lucky;
        e["sample_infeasible"] = t.sample_infeasible;
        e["violated_count"] = t.violated_count;
        e["violated_weight"] = t.violated_weight;
        e["satisfied_weight"] = t.satisfied_weight;
        trace.push_back(e);
    }
    j["trace"] = trace;
    return j;
}

json conformance_to_json(const ConformanceReport& r) {
    json j;
    j["function"] = to_string(r.function);
    j["format"] = r.format.spelling();
    std::string modes;
    for (const auto m : r.modes) {
        if (!modes.empty()) modes += ",";
        modes += to_string(m);
    }
    j["modes"] = modes;
    j["total_checked"] = r.total_checked;
    j["mismatch_count"] = r.mismatch_count;
    j["pass"] = r.pass();
    json ms = json::array();
    char buf[32];
    for (const auto& m : r.mismatches) {
        json e;
        std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(m.input));
        e["input"] = buf;
        std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(m.got));
        e["got"] = buf;
        std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(m.expected));
        e["expected"] = buf;
        e["mode"] = to_string(m.mode);
        ms.push_back(e);
    }
    j["mismatches"] = ms;
    return j;
}

void print_conformance(const ConformanceReport& r) {
    std::string modes;
    for (const auto m : r.modes) {
        if (!modes.empty()) modes += ",";
        modes += to_string(m);
    }
    std::printf("%-6s %-9s modes %-14s : %llu checked, %llu mismatches [%s]\n",
                to_string(r.function), r.format.spelling().c_str(), modes.c_str(),
                static_cast<unsigned long long>(r.total_checked),
                static_cast<unsigned long long>(r.mismatch_count),
                r.pass() ? "pass" : "FAIL");
}

CompiledFunction load_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open artifact: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_json(ss.str());
}

std::vector<RoundingMode> parse_modes(const std::string& csv) {
    std::vector<RoundingMode> modes;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) modes.push_back(parse_rounding_mode(cur));
    if (modes.empty()) throw std::invalid_argument("no rounding modes given");
    return modes;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"progressive polynomial generator and validator"};
    app.require_subcommand(1);

    std::string config_path, artifact_path, out_path, report_path, json_path;
    std::string fmt_str, modes_str = "rn,ra,rz,ru,rd", input_hex, mode_str = "rn";
    std::string cache_dir, dump_path;

    auto* gen = app.add_subcommand("gen", "generate a progressive polynomial");
    gen->add_option("config", config_path, "TOML generator config")->required();
    gen->add_option("--out", out_path, "artifact JSON path");
    gen->add_option("--report", report_path, "generation report JSON path");
    gen->add_option("--dump-constraints", dump_path, "write the merged constraint set");

    auto* check = app.add_subcommand("check", "exhaustive conformance check");
    check->add_option("artifact", artifact_path)->required();
    check->add_option("--fmt", fmt_str, "format to check")->required();
    check->add_option("--modes", modes_str, "comma-separated rounding modes");
    check->add_option("--oracle-cache", cache_dir, "oracle table cache directory");
    check->add_option("--json", json_path, "write the report as JSON");

    auto* sweep = app.add_subcommand("sweep", "check every covered format width");
    sweep->add_option("artifact", artifact_path)->required();
    sweep->add_option("--oracle-cache", cache_dir);
    sweep->add_option("--json", json_path);

    auto* bench = app.add_subcommand("bench-convergence", "synthetic convergence bench");
    bench->add_option("spec", config_path, "TOML bench spec")->required();
    bench->add_option("--json", json_path);

    auto* eval = app.add_subcommand("eval", "evaluate one encoded input");
    eval->add_option("artifact", artifact_path)->required();
    eval->add_option("--fmt", fmt_str)->required();
    eval->add_option("--input", input_hex, "input encoding, hex")->required();
    eval->add_option("--mode", mode_str);

    auto* exp = app.add_subcommand("export", "emit an embeddable source file");
    exp->add_option("artifact", artifact_path)->required();
    bool emit_src = false;
    exp->add_flag("--emit-source", emit_src);
    exp->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const GeneratorConfig cfg = config_from_file(config_path);
            if (!dump_path.empty()) {
                ConstraintSet cs =
                    build_progressive_constraints(cfg.function, cfg.ladder, cfg.k_max);
                merge_duplicate_inputs(cs);
                std::ofstream out(dump_path, std::ios::trunc);
                dump_constraints_jsonl(cs, out);
            }
            auto [poly, rep] = generate(cfg);
            if (!report_path.empty()) write_text(report_path, report_to_json(rep).dump(2));
            if (!rep.success) {
                std::fprintf(stderr, "generation failed: %s\n", rep.failure_reason.c_str());
                return 1;
            }
            const CompiledFunction cf = compile(std::move(poly));
            const std::string artifact = export_json(cf);
            if (!out_path.empty())
                write_text(out_path, artifact);
            else
                std::cout << artifact << "\n";
            std::fprintf(stderr,
                         "generated %s: k_max=%d subdomains=%zu specials=%zu "
                         "iterations=%d lucky=%d (%.1fs)\n",
                         to_string(cf.poly.function), cf.poly.k_max,
                         cf.poly.subdomains.size(), cf.poly.special_cases.size(),
                         rep.iterations_used, rep.lucky_count, rep.wall_seconds);
            return 0;
        }
        if (check->parsed()) {
            const CompiledFunction cf = load_artifact(artifact_path);
            const auto modes = parse_modes(modes_str);
            const ConformanceReport rep =
                check_exhaustive(cf, parse_format(fmt_str), modes, cache_dir);
            print_conformance(rep);
            if (!json_path.empty()) write_text(json_path, conformance_to_json(rep).dump(2));
            return rep.pass() ? 0 : 1;
        }
        if (sweep->parsed()) {
            const CompiledFunction cf = load_artifact(artifact_path);
            const auto reports = check_sweep(cf, cache_dir);
            bool ok = true;
            json all = json::array();
            for (const auto& r : reports) {
                print_conformance(r);
                all.push_back(conformance_to_json(r));
                ok = ok && r.pass();
            }
            if (!json_path.empty()) write_text(json_path, all.dump(2));
            return ok ? 0 : 1;
        }
        if (bench->parsed()) {
            const auto doc = tomllite::parse_file(config_path);
            std::vector<long> ks, ns;
            if (doc.root.has("ks"))
                for (const auto& v : doc.root.values.at("ks").items) ks.push_back(v.i);
            if (doc.root.has("ns"))
                for (const auto& v : doc.root.values.at("ns").items) ns.push_back(v.i);
            if (ks.empty()) ks = {4};
            if (ns.empty()) ns = {100000};
            ConvergenceSpec spec;
            spec.seeds = static_cast<int>(doc.root.get_int("seeds", 20));
            spec.max_iterations =
                static_cast<int>(doc.root.get_int("max_iterations", 4000));
            const std::uint64_t base_seed =
                static_cast<std::uint64_t>(doc.root.get_int("rng_seed", 12345));
            bool ok = true;
            json all = json::array();
            for (long k : ks) {
                for (long n : ns) {
                    spec.k = static_cast<int>(k);
                    spec.n = static_cast<std::uint64_t>(n);
                    const ConvergenceStats st = convergence_bench(spec, base_seed);
                    const double lucky_frac =
                        st.iterations_total
                            ? static_cast<double>(st.lucky_total) /
                                  static_cast<double>(st.iterations_total)
                            : 0.0;
                    const bool pass = st.successes == st.seeds &&
                                      st.median_iterations <= st.bound;
                    ok = ok && pass;
                    std::printf("k=%d n=%llu seeds=%d: success %d/%d, median %.0f "
                                "(bound %.0f), lucky %.2f [%s]\n",
                                st.k, static_cast<unsigned long long>(st.n), st.seeds,
                                st.successes, st.seeds, st.median_iterations, st.bound,
                                lucky_frac, pass ? "pass" : "FAIL");
                    json e;
                    e["k"] = st.k;
                    e["n"] = st.n;
                    e["seeds"] = st.seeds;
                    e["successes"] = st.successes;
                    e["median_iterations"] = st.median_iterations;
                    e["bound_6k_ln_n"] = st.bound;
                    e["lucky_fraction"] = lucky_frac;
                    e["pass"] = pass;
                    all.push_back(e);
                }
            }
            if (!json_path.empty()) write_text(json_path, all.dump(2));
            return ok ? 0 : 1;
        }
        if (eval->parsed()) {
            const CompiledFunction cf = load_artifact(artifact_path);
            const FpFormat fmt = parse_format(fmt_str);
            const std::uint64_t bits = std::stoull(input_hex, nullptr, 16);
            const FpValue x{fmt, bits & fmt.encoding_mask()};
            const FpValue y = evaluate(cf, x, fmt, parse_rounding_mode(mode_str));
            std::printf("0x%llX\n", static_cast<unsigned long long>(y.bits));
            return 0;
        }
        if (exp->parsed()) {
            const CompiledFunction cf = load_artifact(artifact_path);
            if (!emit_src) throw std::invalid_argument("export: pass --emit-source");
            const std::string src = emit_source(cf);
            std::fprintf(stderr, "artifact table bytes: %zu (json), %zu (source)\n",
                         export_json(cf).size(), src.size());
            if (!out_path.empty())
                write_text(out_path, src);
            else
                std::cout << src;
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
