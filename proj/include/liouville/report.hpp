#pragma once

// JSON views of result records plus atomic file output.  Serialization is
// deterministic: nlohmann emits shortest round-trip doubles and object keys
// stay in insertion order with ordered_json.

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "counterexample.hpp"
#include "criterion.hpp"
#include "proofsim.hpp"

namespace liouville {

using OrderedJson = nlohmann::ordered_json;

inline OrderedJson report_json(const QSample& s) {
    OrderedJson j;
    j["r"] = s.r;
    j["q"] = s.value;
    j["integrand"] = s.integrand;
    j["exact"] = s.exact;
    return j;
}

inline OrderedJson report_json(const CriterionReport& r) {
    OrderedJson j;
    j["verdict"] = to_string(r.verdict);
    j["method"] = to_string(r.method);
    j["symbolic"] = r.symbolic;
    j["evidence"] = r.evidence;
    if (r.symbolic) {
        j["net_power"] = r.net_power;
        j["net_log"] = r.net_log;
    }
    j["r_start"] = r.r_start;
    auto samples = OrderedJson::array();
    for (const auto& s : r.samples) samples.push_back(report_json(s));
    j["samples"] = std::move(samples);
    auto ladder = OrderedJson::array();
    for (std::size_t i = 0; i < r.ladder.size(); ++i) {
        OrderedJson row;
        row["R"] = r.ladder[i];
        row["integral"] = r.partial_integrals[i];
        ladder.push_back(std::move(row));
    }
    j["partial_integrals"] = std::move(ladder);
    return j;
}

inline OrderedJson report_json(const SeriesReport& r) {
    OrderedJson j;
    j["verdict"] = to_string(r.verdict);
    j["method"] = "series";
    j["spacing_ok"] = r.spacing_ok;
    j["terms"] = r.terms;
    j["log_partial_sum"] = r.log_partial_sum;
    if (std::isfinite(r.partial_sum)) j["partial_sum"] = r.partial_sum;
    j["evidence"] = r.evidence;
    return j;
}

inline OrderedJson report_json(const PoissonCheck& p) {
    OrderedJson j;
    j["sup_rel"] = p.sup_rel;
    j["sup_abs"] = p.sup_abs;
    j["source_scale"] = p.source_scale;
    j["r_lo"] = p.r_lo;
    j["r_hi"] = p.r_hi;
    return j;
}

inline OrderedJson report_json(const AsymptoticBracket& b) {
    OrderedJson j;
    j["c_lo"] = b.c_lo;
    j["c_hi"] = b.c_hi;
    j["ratio"] = b.ratio;
    return j;
}

inline OrderedJson report_json(const WeightExponentFit& f) {
    OrderedJson j;
    j["nu_hat"] = f.nu_hat;
    j["amplitude_log"] = f.amplitude_log;
    j["rms"] = f.rms;
    j["chain_builds"] = f.chain_builds;
    return j;
}

inline OrderedJson report_json(const CounterexampleCertificate& c) {
    OrderedJson j;
    j["n"] = c.n;
    j["k"] = c.k;
    j["nu"] = c.nu;
    j["lambda"] = c.lambda;
    j["eps"] = c.eps;
    j["grid_count"] = c.grid_count;
    j["refinements"] = c.refinements;
    j["u_power"] = c.u_power;
    j["u_log_power"] = c.u_logpow;
    j["implied_b_power"] = c.implied_b_power;
    j["implied_b_log_fit"] = report_json(c.implied_b_fit);
    j["bracket"] = report_json(c.bracket);
    auto lv = OrderedJson::array();
    for (const auto& p : c.poisson) lv.push_back(report_json(p));
    j["poisson"] = std::move(lv);
    return j;
}

inline OrderedJson report_json(const LemmaCheck& c) {
    OrderedJson j;
    j["hypothesis_ok"] = c.hypothesis_ok;
    if (!c.note.empty()) j["note"] = c.note;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["fitted_constant"] = c.fitted_constant;
    return j;
}

inline OrderedJson report_json(const XiPartition& x) {
    OrderedJson j;
    auto radii = OrderedJson::array();
    for (double r : x.radii) radii.push_back(r);
    auto mass = OrderedJson::array();
    for (double v : x.mass) mass.push_back(v);
    auto xi1 = OrderedJson::array();
    for (int i : x.xi1) xi1.push_back(i);
    auto xi2 = OrderedJson::array();
    for (int i : x.xi2) xi2.push_back(i);
    j["radii"] = std::move(radii);
    j["mass"] = std::move(mass);
    j["xi1"] = std::move(xi1);
    j["xi2"] = std::move(xi2);
    return j;
}

inline OrderedJson report_json(const BlowupResult& b) {
    OrderedJson j;
    j["blew_up"] = b.blew_up;
    j["steps_to_blowup"] = b.steps_to_blowup;
    auto t = OrderedJson::array();
    for (double J : b.trajectory) t.push_back(J);
    j["trajectory"] = std::move(t);
    return j;
}

inline OrderedJson report_json(const Lemma34Result& r) {
    OrderedJson j;
    j["alpha"] = r.alpha;
    j["kappa"] = r.kappa;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["min_ratio"] = r.min_ratio;
    j["argmin_trial"] = r.argmin_trial;
    return j;
}

// --- atomic output ----------------------------------------------------------

// Writes via a temporary then renames, so readers never observe a partial
// file and a failed run leaves no output at the target path.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp.string());
        os << text;
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw std::runtime_error("rename failed for " + path.string() + ": " + ec.message());
    }
}

inline void atomic_write_json(const std::filesystem::path& path, const OrderedJson& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace liouville
