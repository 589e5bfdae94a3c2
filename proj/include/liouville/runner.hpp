#pragma once

// Command driver shared by the command-line tool and the tests: resolves the
// input (spec file or named preset), runs the requested analysis, and writes
// reports under the output directory.  All file output is atomic and fully
// determined by the configuration, so identical configurations produce
// byte-identical reports.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "counterexample.hpp"
#include "criterion.hpp"
#include "presets.hpp"
#include "proofsim.hpp"
#include "report.hpp"
#include "weakform.hpp"

namespace liouville {

struct RunConfig {
    std::string command;    // criterion | counterexample | verify | proofsim | lemma34
    std::string spec_path;  // JSON input ("" = none)
    std::string preset;     // named example, optionally "name:key=value,..."
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    double tol = 0.0;    // 0 = command default
    int grid_count = 0;  // 0 = command default
};

namespace run_detail {

inline OrderedJson config_json(const RunConfig& cfg) {
    OrderedJson j;
    j["command"] = cfg.command;
    j["spec"] = cfg.spec_path;
    j["preset"] = cfg.preset;
    j["out"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["tol"] = cfg.tol;
    j["grid"] = cfg.grid_count;
    return j;
}

struct PresetSpec {
    std::string name;
    std::map<std::string, double> args;
};

inline PresetSpec parse_preset(const std::string& text) {
    PresetSpec p;
    const auto colon = text.find(':');
    p.name = text.substr(0, colon);
    if (colon == std::string::npos) return p;
    std::string rest = text.substr(colon + 1);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw SchemaError("schema error: preset argument '" + item +
                              "' is not of the form key=value");
        const std::string key = item.substr(0, eq);
        try {
            std::size_t used = 0;
            const double v = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument("trailing text");
            p.args[key] = v;
        } catch (const std::exception&) {
            throw SchemaError("schema error: preset argument '" + item +
                              "' has a non-numeric value");
        }
    }
    return p;
}

inline double arg_or(const PresetSpec& p, const std::string& key, double fallback) {
    const auto it = p.args.find(key);
    return it == p.args.end() ? fallback : it->second;
}

inline nlohmann::json load_spec_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SchemaError("schema error: cannot open spec file: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw SchemaError("schema error: spec file is empty: " + path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw SchemaError("schema error: spec file is not valid JSON: " + path);
    return j;
}

inline double require_spec_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw SchemaError(std::string("schema error at spec: missing numeric '") + key + "'");
    return j[key].get<double>();
}

// Problem input for the criterion command: a named preset or a spec file
// holding the problem (directly, or under a "problem" key).
inline ProblemSpec resolve_problem(const RunConfig& cfg) {
    if (!cfg.preset.empty()) {
        const PresetSpec p = parse_preset(cfg.preset);
        if (p.name == "example21_power")
            return presets::example21_power(int(arg_or(p, "n", 3)), int(arg_or(p, "k", 1)),
                                            arg_or(p, "lambda", 2.0), arg_or(p, "l", -1.0));
        if (p.name == "example21_log")
            return presets::example21_log(int(arg_or(p, "n", 3)), int(arg_or(p, "k", 1)),
                                          arg_or(p, "lambda", 2.0), arg_or(p, "nu", 0.0));
        if (p.name == "example22_dyadic") return presets::example22_dyadic(arg_or(p, "nu", 0.0));
        throw SchemaError("schema error: unknown criterion preset '" + p.name + "'");
    }
    if (cfg.spec_path.empty())
        throw SchemaError("schema error: criterion needs --spec or --preset");
    nlohmann::json j = load_spec_file(cfg.spec_path);
    if (j.contains("problem")) j = j["problem"];
    return ProblemSpec::from_json(j);
}

struct CounterexampleParams {
    int n = 0;
    int k = 0;
    double nu = 0.0;
    double lambda = 0.0;
    double eps = 1.0;
};

inline CounterexampleParams counterexample_params(const RunConfig& cfg) {
    if (cfg.spec_path.empty())
        throw SchemaError(
            "schema error: this command needs --spec with fields n, k, nu, lambda");
    const nlohmann::json j = load_spec_file(cfg.spec_path);
    CounterexampleParams p;
    p.n = int(require_spec_number(j, "n"));
    p.k = int(require_spec_number(j, "k"));
    p.nu = require_spec_number(j, "nu");
    p.lambda = require_spec_number(j, "lambda");
    if (j.contains("eps")) p.eps = require_spec_number(j, "eps");
    return p;
}

inline CounterexampleCertificate build_from_params(const CounterexampleParams& p,
                                                   const RunConfig& cfg) {
    CounterexampleOptions o;
    if (cfg.grid_count > 0) o.grid_count = cfg.grid_count;
    if (cfg.tol > 0.0) o.residual_tol = cfg.tol;
    o.eps = p.eps;
    return build_counterexample(p.n, p.k, p.nu, p.lambda, o);
}

inline OrderedJson params_json(const CounterexampleParams& p) {
    OrderedJson j;
    j["n"] = p.n;
    j["k"] = p.k;
    j["nu"] = p.nu;
    j["lambda"] = p.lambda;
    j["eps"] = p.eps;
    return j;
}

inline std::string csv_of(const TabulatedRadialFunction& f) {
    std::ostringstream os;
    f.write_csv(os);
    return os.str();
}

// --- criterion ---------------------------------------------------------------

inline int run_criterion(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    OrderedJson report;
    report["config"] = config_json(cfg);

    const PresetSpec p = cfg.preset.empty() ? PresetSpec{} : parse_preset(cfg.preset);
    if (p.name == "example22_series" || p.name == "example22_series_linear") {
        const std::size_t terms = std::size_t(arg_or(p, "terms", 1000));
        const presets::DyadicSeries ds =
            p.name == "example22_series"
                ? presets::example22_series(arg_or(p, "nu", 0.0), terms)
                : presets::example22_series_linear(terms);
        const SeriesReport sr =
            series_criterion_log(ds.problem, ds.log_radii, ds.log_b, ds.pattern);
        report["problem"] = OrderedJson(ds.problem.to_json());
        report["series"] = report_json(sr);
        report["verdict"] = to_string(sr.verdict);
        atomic_write_json(dir / "report.json", report);
        out << "criterion: " << to_string(sr.verdict) << " (series over " << sr.terms
            << " terms)\n";
        out << "wrote " << (dir / "report.json").string() << "\n";
        return 0;
    }

    const ProblemSpec s = resolve_problem(cfg);
    ClassifyOptions copt;
    if (cfg.tol > 0.0) copt.quad_rel_tol = cfg.tol;

    std::vector<CriterionMethod> methods{CriterionMethod::essinf, CriterionMethod::hoelder};
    if (s.f) {
        methods.push_back(CriterionMethod::f_essinf);
        methods.push_back(CriterionMethod::f_hoelder);
    }

    report["problem"] = OrderedJson(s.to_json());
    auto arr = OrderedJson::array();
    bool any_forced = false, any_inconclusive = false, any_ok = false;
    for (CriterionMethod m : methods) {
        OrderedJson row;
        try {
            const CriterionReport r = classify_divergence(s, m, copt);
            row = report_json(r);
            any_ok = true;
            if (r.verdict == Verdict::ForcedTrivial) any_forced = true;
            if (r.verdict == Verdict::Inconclusive) any_inconclusive = true;
        } catch (const std::domain_error& e) {
            row["method"] = to_string(m);
            row["error"] = e.what();
        }
        arr.push_back(std::move(row));
    }
    if (!any_ok) throw std::domain_error("criterion: no applicable annulus functional");
    const char* verdict = any_forced ? "ForcedTrivial"
                          : any_inconclusive ? "Inconclusive"
                                             : "NotForced";
    report["methods"] = std::move(arr);
    report["verdict"] = verdict;
    atomic_write_json(dir / "report.json", report);
    out << "criterion: " << verdict << "\n";
    out << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

// --- counterexample ----------------------------------------------------------

inline int run_counterexample(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    const CounterexampleParams p = counterexample_params(cfg);
    const CounterexampleCertificate cert = build_from_params(p, cfg);

    OrderedJson report;
    report["config"] = config_json(cfg);
    report["params"] = params_json(p);
    report["certificate"] = report_json(cert);
    atomic_write_json(dir / "report.json", report);
    atomic_write_text(dir / "u.csv", csv_of(cert.u));
    for (std::size_t i = 0; i < cert.levels.size(); ++i)
        atomic_write_text(dir / ("w" + std::to_string(i + 1) + ".csv"),
                          csv_of(cert.levels[i]));
    {
        std::ostringstream os;
        os << "r,implied_b\n";
        char buf[64];
        for (double r : log_spaced(1e-2, 1e5, 200)) {
            const double v = cert.implied_b(r);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r, v);
            os << buf;
        }
        atomic_write_text(dir / "implied_b.csv", os.str());
    }
    double worst = 0.0;
    for (const auto& chk : cert.poisson) worst = std::max(worst, chk.sup_rel);
    out << "counterexample: " << cert.levels.size() << " level(s), worst residual " << worst
        << ", bracket ratio " << cert.bracket.ratio << ", fitted log exponent "
        << cert.implied_b_fit.nu_hat << " (target " << cert.nu << ")\n";
    out << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

// --- verify -------------------------------------------------------------------

inline int run_verify(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    const CounterexampleParams p = counterexample_params(cfg);
    const CounterexampleCertificate cert = build_from_params(p, cfg);

    auto u_call = [&](double r) { return cert.u(r); };
    auto b_call = [&](double r) { return cert.implied_b(r); };

    const int order = 2 * p.k + 1;
    const std::vector<std::pair<double, double>> windows{
        {10.0, 31.6227766016838}, {31.6227766016838, 100.0}, {100.0, 316.227766016838},
        {316.227766016838, 1000.0}, {10.0, 1000.0}};

    OrderedJson report;
    report["config"] = config_json(cfg);
    report["params"] = params_json(p);
    auto arr = OrderedJson::array();
    bool all_hold = true;
    double worst_gap = 0.0;
    for (const auto& [r1, r2] : windows) {
        TestFunction test;
        test.r1 = r1;
        test.r2 = r2;
        test.order = order;
        const WeakFormCheck chk = verify_weak(u_call, b_call, p.lambda, p.k, p.n, test);
        OrderedJson row;
        row["r1"] = r1;
        row["r2"] = r2;
        row["order"] = order;
        row["lhs"] = chk.lhs;
        row["rhs"] = chk.rhs;
        row["rel_gap"] = chk.rel_gap;
        row["holds"] = chk.holds;
        all_hold = all_hold && chk.holds;
        worst_gap = std::max(worst_gap, std::abs(chk.rel_gap));
        arr.push_back(std::move(row));
    }
    report["weak_form"] = std::move(arr);
    report["all_hold"] = all_hold;
    report["worst_rel_gap"] = worst_gap;
    atomic_write_json(dir / "report.json", report);
    out << "verify: " << (all_hold ? "all windows hold" : "violation found")
        << ", worst relative gap " << worst_gap << "\n";
    out << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

// --- proofsim ------------------------------------------------------------------

inline int run_proofsim(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    OrderedJson report;
    report["config"] = config_json(cfg);

    if (!cfg.preset.empty()) {
        const PresetSpec ps = parse_preset(cfg.preset);
        presets::BlowupPreset bp;
        int max_steps = 0;
        if (ps.name == "blowup_divergent") {
            bp = presets::blowup_divergent();
            max_steps = int(arg_or(ps, "max_steps", 50));
        } else if (ps.name == "blowup_convergent") {
            bp = presets::blowup_convergent();
            max_steps = int(arg_or(ps, "max_steps", 200));
        } else {
            throw SchemaError("schema error: unknown proofsim preset '" + ps.name + "'");
        }
        StepParams sp;
        sp.n = bp.problem.n;
        sp.m = bp.problem.m;
        sp.lambda = bp.problem.lambda;
        sp.sigma = bp.problem.sigma;
        auto h = [&](double r) { return h_hoelder(bp.problem, r).value; };
        report["problem"] = OrderedJson(bp.problem.to_json());
        auto arr = OrderedJson::array();
        for (double C : {1e-6, 1e-3, 1.0}) {
            const BlowupResult res = blowup_iterate(sp, h, bp.r0, bp.J0, C, max_steps);
            OrderedJson row;
            row["C"] = C;
            row["result"] = report_json(res);
            arr.push_back(std::move(row));
            out << "proofsim: C = " << C << " -> "
                << (res.blew_up ? "blow-up at step " + std::to_string(res.steps_to_blowup)
                                : "bounded over " + std::to_string(max_steps) + " steps")
                << "\n";
        }
        report["blowup"] = std::move(arr);
        atomic_write_json(dir / "report.json", report);
        out << "wrote " << (dir / "report.json").string() << "\n";
        return 0;
    }

    // Spec-driven run: simulate the machinery on a constructed solution.
    const CounterexampleParams p = counterexample_params(cfg);
    const CounterexampleCertificate cert = build_from_params(p, cfg);
    StepParams sp;
    sp.n = p.n;
    sp.m = 2 * p.k;
    sp.lambda = p.lambda;
    sp.sigma = 2.0;

    auto u_call = [&](double r) { return cert.u(r); };
    auto b_call = [&](double r) { return cert.implied_b(r); };
    auto J = [&](double r) { return forcing_mass(b_call, u_call, p.lambda, p.n, r); };
    const double ring = std::sqrt(sp.sigma);
    auto h = [&](double r) {
        auto f = [&](double t) {
            return std::pow(b_call(t * r), -1.0 / (sp.lambda - 1.0)) * std::pow(t, sp.n - 1);
        };
        const QuadResult part = integrate_gk(f, 1.0 / ring, ring, 1e-9);
        if (part.infinite) return 0.0;
        const double avg = unit_sphere_area(sp.n) * part.value;
        return avg > 0.0 ? std::pow(avg, 1.0 - sp.lambda) : 0.0;
    };

    report["params"] = params_json(p);
    auto arr = OrderedJson::array();
    for (double r : log_spaced(10.0, 1e3, 9)) {
        OrderedJson row;
        row["r"] = r;
        row["lemma31"] = report_json(lemma31_check(J, h, r, ring * r, sp));
        row["lemma32"] = report_json(lemma32_check(J, h, r, ring * r, sp));
        row["lemma33"] = report_json(lemma33_check(J, h, r, ring * r, sp));
        arr.push_back(std::move(row));
    }
    report["lemmas"] = std::move(arr);

    {
        const std::vector<double> rhos = doubling_sequence(J, 1.0, 100.0);
        auto dj = OrderedJson::array();
        for (double r : rhos) dj.push_back(r);
        report["doubling_radii"] = std::move(dj);
    }
    report["xi_partition"] = report_json(xi_partition(J, 1.0, sp.sigma, 30));
    atomic_write_json(dir / "report.json", report);
    out << "proofsim: lemma sweep over [10, 1000] with " << 9 << " radii\n";
    out << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

// --- lemma34 -------------------------------------------------------------------

inline int run_lemma34(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    double alpha = 0.5, kappa = 2.0, ratio = 2.0, trials = 10000, r1 = 1.0;
    if (!cfg.preset.empty()) {
        const PresetSpec ps = parse_preset(cfg.preset);
        if (ps.name != "envelope")
            throw SchemaError("schema error: unknown lemma34 preset '" + ps.name + "'");
        alpha = arg_or(ps, "alpha", alpha);
        kappa = arg_or(ps, "kappa", kappa);
        ratio = arg_or(ps, "ratio", ratio);
        trials = arg_or(ps, "trials", trials);
        r1 = arg_or(ps, "r1", r1);
    } else if (!cfg.spec_path.empty()) {
        const nlohmann::json j = load_spec_file(cfg.spec_path);
        alpha = require_spec_number(j, "alpha");
        kappa = require_spec_number(j, "kappa");
        if (j.contains("ratio")) ratio = require_spec_number(j, "ratio");
        if (j.contains("trials")) trials = require_spec_number(j, "trials");
        if (j.contains("r1")) r1 = require_spec_number(j, "r1");
    }
    const Lemma34Result res =
        lemma34_harness(alpha, kappa, r1, r1 * ratio, std::size_t(trials), cfg.seed);
    OrderedJson report;
    report["config"] = config_json(cfg);
    report["result"] = report_json(res);
    atomic_write_json(dir / "report.json", report);
    out << "lemma34: min ratio " << res.min_ratio << " at trial " << res.argmin_trial
        << " of " << res.trials << "\n";
    out << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

inline OrderedJson error_json(const char* type, const std::string& message) {
    OrderedJson j;
    j["error"]["type"] = type;
    j["error"]["message"] = message;
    return j;
}

}  // namespace run_detail

// Exit codes: 0 success, 2 schema/usage error, 3 mathematical rejection,
// 1 unexpected failure.  Errors are emitted as a JSON object on `err` and no
// partial outputs are left behind (all writes are atomic and happen last).
inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    using namespace run_detail;
    try {
        if (cfg.command == "criterion") return run_criterion(cfg, out);
        if (cfg.command == "counterexample") return run_counterexample(cfg, out);
        if (cfg.command == "verify") return run_verify(cfg, out);
        if (cfg.command == "proofsim") return run_proofsim(cfg, out);
        if (cfg.command == "lemma34") return run_lemma34(cfg, out);
        throw SchemaError("schema error: unknown command '" + cfg.command + "'");
    } catch (const SchemaError& e) {
        err << error_json("schema", e.what()).dump() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << error_json("domain", e.what()).dump() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << error_json("domain", e.what()).dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << error_json("internal", e.what()).dump() << "\n";
        return 1;
    }
}

}  // namespace liouville
