// Acceptance gate: seven end-to-end criteria, one PASS/FAIL line each,
// nonzero exit when any fails.  Expected values are re-derived here from
// first principles rather than copied from library internals.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/counterexample.hpp"
#include "liouville/criterion.hpp"
#include "liouville/presets.hpp"
#include "liouville/proofsim.hpp"
#include "liouville/runner.hpp"
#include "liouville/weakform.hpp"

using namespace liouville;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(std::string msg) {
        ok = false;
        if (detail.empty()) detail = std::move(msg);
    }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

struct GridCase {
    int n;
    int k;
    double lambda;
};

std::vector<GridCase> parameter_grid() {
    std::vector<GridCase> grid;
    for (int n : {3, 4, 5})
        for (int k : {1, 2}) {
            if (n <= 2 * k) continue;
            for (double lambda : {1.5, 2.0, 3.0}) grid.push_back({n, k, lambda});
        }
    return grid;
}

// 1. Pure power forcing: the verdict flips exactly at the critical exponent,
//    certified symbolically at every grid point.
Outcome power_exponent_boundary() {
    Outcome out;
    for (const GridCase& g : parameter_grid()) {
        const double crit = double(g.n - 2 * g.k) * g.lambda - double(g.n);
        for (int j = -4; j <= 4; ++j) {
            const double l = crit + 0.25 * j;
            const ProblemSpec s = presets::example21_power(g.n, g.k, g.lambda, l);
            const CriterionReport rep = classify_divergence(s, CriterionMethod::essinf);
            if (!rep.symbolic) {
                out.fail(fmt("no symbolic certificate at n=%.0f k=%.0f, offset %.2f",
                             g.n, g.k, 0.25 * j));
                return out;
            }
            const bool want = j >= 0;
            const Verdict expect = want ? Verdict::ForcedTrivial : Verdict::NotForced;
            if (rep.verdict != expect) {
                out.fail(fmt("wrong verdict at lambda=%.1f, exponent offset %.2f", g.lambda,
                             0.25 * j));
                return out;
            }
        }
    }
    return out;
}

// 2. Critical power with a log twist: triviality is forced exactly for
//    log exponents >= -1, each case decided by the symbolic certificate.
Outcome critical_log_boundary() {
    Outcome out;
    for (const GridCase& g : parameter_grid()) {
        for (double nu : {-1.5, -1.0, -0.5, 0.0, 1.0}) {
            const ProblemSpec s = presets::example21_log(g.n, g.k, g.lambda, nu);
            const CriterionReport rep = classify_divergence(s, CriterionMethod::essinf);
            if (!rep.symbolic) {
                out.fail(fmt("no symbolic certificate at lambda=%.1f nu=%.1f", g.lambda, nu));
                return out;
            }
            const Verdict expect = nu >= -1.0 ? Verdict::ForcedTrivial : Verdict::NotForced;
            if (rep.verdict != expect) {
                out.fail(fmt("wrong verdict at lambda=%.1f nu=%.1f", g.lambda, nu));
                return out;
            }
        }
    }
    return out;
}

// 3. Windowed critical forcing: the masked family still forces triviality at
//    nu = -1 and 0, and the series form reproduces divergence exactly for
//    nu >= -1 over a thousand terms.
Outcome windowed_family_and_series() {
    Outcome out;
    for (double nu : {-1.0, 0.0}) {
        const CriterionReport rep =
            classify_divergence(presets::example22_dyadic(nu), CriterionMethod::essinf);
        if (!rep.symbolic || rep.verdict != Verdict::ForcedTrivial) {
            out.fail(fmt("windowed family not forced at nu=%.1f", nu));
            return out;
        }
    }
    for (double nu : {-1.5, -1.0, 0.0}) {
        const presets::DyadicSeries ds = presets::example22_series(nu, 1000);
        const SeriesReport sr =
            series_criterion_log(ds.problem, ds.log_radii, ds.log_b, ds.pattern);
        if (sr.terms != 1000 || !sr.spacing_ok) {
            out.fail("series geometry rejected");
            return out;
        }
        const Verdict expect = nu >= -1.0 ? Verdict::ForcedTrivial : Verdict::NotForced;
        if (sr.verdict != expect) {
            out.fail(fmt("series verdict wrong at nu=%.1f", nu));
            return out;
        }
    }
    return out;
}

// 4. Constructed near-critical solutions: per-level residuals, asymptotic
//    bracket, recovered log exponent, and weak-form equality on five windows.
Outcome counterexample_certificates() {
    Outcome out;
    struct Case {
        int n;
        int k;
        double lambda;
        double nu;
    };
    const std::vector<std::pair<double, double>> windows{
        {10.0, 31.6227766016838},
        {31.6227766016838, 100.0},
        {100.0, 316.227766016838},
        {316.227766016838, 1000.0},
        {10.0, 1000.0}};
    for (const Case& c : {Case{3, 1, 2.0, -2.0}, Case{5, 2, 1.5, -3.0}}) {
        const CounterexampleCertificate cert =
            build_counterexample(c.n, c.k, c.nu, c.lambda);
        for (const PoissonCheck& chk : cert.poisson) {
            if (!(chk.sup_rel <= 1e-6)) {
                out.fail(fmt("level residual %.2e exceeds 1e-6 (n=%.0f)", chk.sup_rel,
                             double(c.n)));
                return out;
            }
        }
        if (!(cert.bracket.c_lo > 0.0) || !(cert.bracket.ratio <= 2.0)) {
            out.fail(fmt("asymptotic bracket ratio %.3f out of range (n=%.0f)",
                         cert.bracket.ratio, double(c.n)));
            return out;
        }
        if (!(std::abs(cert.implied_b_fit.nu_hat - c.nu) <= 0.05)) {
            out.fail(fmt("recovered log exponent %.4f vs target %.1f",
                         cert.implied_b_fit.nu_hat, c.nu));
            return out;
        }
        auto u_call = [&](double r) { return cert.u(r); };
        auto b_call = [&](double r) { return cert.implied_b(r); };
        for (const auto& [r1, r2] : windows) {
            TestFunction test;
            test.r1 = r1;
            test.r2 = r2;
            test.order = 2 * c.k + 1;
            const WeakFormCheck chk = verify_weak(u_call, b_call, c.lambda, c.k, c.n, test);
            if (!chk.holds || !(std::abs(chk.rel_gap) <= 1e-6)) {
                out.fail(fmt("weak-form gap %.2e on window [%.0f, %.0f]", chk.rel_gap, r1, r2));
                return out;
            }
        }
    }
    return out;
}

// Window-averaged functional for a pointwise weight, on the sqrt(sigma) ring.
template <class BF>
auto window_average_h(BF b, int n, double lambda, double sigma) {
    return [b, n, lambda, ring = std::sqrt(sigma)](double r) {
        auto f = [&](double t) {
            return std::pow(b(t * r), -1.0 / (lambda - 1.0)) * std::pow(t, n - 1);
        };
        const QuadResult part = integrate_gk(f, 1.0 / ring, ring, 1e-9);
        if (part.infinite) return 0.0;
        const double avg = unit_sphere_area(n) * part.value;
        return avg > 0.0 ? std::pow(avg, 1.0 - lambda) : 0.0;
    };
}

// 5. Step inequalities, doubling radii, window domination, and the blow-up
//    recurrence, exercised on constructed-solution data and a scale-free
//    power-law mass.
Outcome proof_machinery() {
    Outcome out;
    const CounterexampleCertificate cert = build_counterexample(3, 1, -2.0, 2.0);
    const StepParams sp;  // n=3, m=2, lambda=2, sigma=2
    auto b = [&](double r) { return cert.implied_b(r); };
    auto u = [&](double r) { return cert.u(r); };
    auto J = [&](double r) { return forcing_mass(b, u, sp.lambda, sp.n, r); };
    auto h = window_average_h(b, sp.n, sp.lambda, sp.sigma);
    const double ring = std::sqrt(sp.sigma);

    double lo31 = kInf, hi31 = 0.0, lo33 = kInf, hi33 = 0.0;
    for (double r : log_spaced(10.0, 1000.0, 9)) {
        const LemmaCheck c31 = lemma31_check(J, h, r, ring * r, sp);
        const LemmaCheck c33 = lemma33_check(J, h, r, ring * r, sp);
        if (!c31.hypothesis_ok || !(c31.fitted_constant > 0.0)) {
            out.fail(fmt("growth step fails at r=%.1f", r));
            return out;
        }
        if (!c33.hypothesis_ok || !(c33.fitted_constant > 0.0)) {
            out.fail(fmt("flat step fails at r=%.1f", r));
            return out;
        }
        lo31 = std::min(lo31, c31.fitted_constant);
        hi31 = std::max(hi31, c31.fitted_constant);
        lo33 = std::min(lo33, c33.fitted_constant);
        hi33 = std::max(hi33, c33.fitted_constant);
    }
    if (!(hi31 / lo31 <= 10.0)) {
        out.fail(fmt("growth-step constant drifts %.2fx over two decades", hi31 / lo31));
        return out;
    }
    if (!(hi33 / lo33 <= 10.0)) {
        out.fail(fmt("flat-step constant drifts %.2fx over two decades", hi33 / lo33));
        return out;
    }

    // fast-growth step on a scale-free power-law mass, where every increment
    // doubles and the fitted constant must not drift at all
    ProblemSpec sfast = presets::example21_power(3, 1, 2.0, -3.0);
    sfast.sigma = 16.0;
    const StepParams spfast{sfast.n, sfast.m, sfast.lambda, sfast.sigma};
    auto bfast = [&](double r) { return sfast.b(r); };
    auto ufast = [](double r) { return r; };
    auto Jfast = [&](double r) { return forcing_mass(bfast, ufast, sfast.lambda, sfast.n, r); };
    auto hfast = [&](double r) { return h_hoelder(sfast, r).value; };
    double lo32 = kInf, hi32 = 0.0;
    for (double r : log_spaced(1.0, 100.0, 9)) {
        const LemmaCheck c32 = lemma32_check(Jfast, hfast, r, 4.0 * r, spfast);
        if (!c32.hypothesis_ok || !(c32.fitted_constant > 0.0)) {
            out.fail(fmt("fast-growth step fails at r=%.1f", r));
            return out;
        }
        lo32 = std::min(lo32, c32.fitted_constant);
        hi32 = std::max(hi32, c32.fitted_constant);
    }
    if (!(hi32 / lo32 <= 10.0)) {
        out.fail(fmt("fast-growth constant drifts %.2fx over two decades", hi32 / lo32));
        return out;
    }

    // doubling radii: consecutive masses double exactly, radii stay ordered
    // inside the span, and the sequence stops only when no doubling fits
    const std::vector<double> rhos = doubling_sequence(J, 0.01, 100.0);
    if (rhos.size() < 3) {
        out.fail("doubling sequence unexpectedly short");
        return out;
    }
    const double Jend = J(100.0);
    for (std::size_t i = 0; i + 1 < rhos.size(); ++i) {
        if (!(rhos[i] < rhos[i + 1]) || rhos[i + 1] > 100.0 || rhos[i] < 0.01) {
            out.fail("doubling radii leave the span");
            return out;
        }
        const double ratio = J(rhos[i + 1]) / J(rhos[i]);
        if (!(std::abs(ratio - 2.0) <= 2e-6) || !(ratio >= 2.0 - 1e-6) ||
            !(ratio <= 4.0 + 1e-6)) {
            out.fail(fmt("mass ratio %.8f across a doubling step", ratio));
            return out;
        }
    }
    if (!(2.0 * J(rhos.back()) > Jend * (1.0 - 1e-9))) {
        out.fail("doubling sequence stopped early");
        return out;
    }

    // the narrow-window average dominates the wide-annulus functional
    ProblemSpec swide;
    swide.n = 3;
    swide.m = 2;
    swide.k = 1;
    swide.lambda = 2.0;
    swide.sigma = 2.0;
    swide.a = RadialProfile::constant(1.0);
    swide.b = RadialProfile::product(
        {RadialProfile::power(-1.0, true), RadialProfile::log_power(-2.0, true)});
    for (double r : log_spaced(2.0, 1e4, 100)) {
        const double hv = h_hoelder(swide, r).value;
        const double qv = q_hoelder(swide, r).value;
        if (!(hv >= qv * (1.0 - 1e-9))) {
            out.fail(fmt("window average %.3e below annulus functional %.3e at r=%.1f", hv, qv, r));
            return out;
        }
    }

    // recurrence budgets: supercritical mass escapes fast, subcritical stays put
    const presets::BlowupPreset div = presets::blowup_divergent();
    const StepParams spdiv{div.problem.n, div.problem.m, div.problem.lambda, div.problem.sigma};
    auto hdiv = [&](double r) { return h_hoelder(div.problem, r).value; };
    for (double C : {1e-6, 1e-3, 1.0}) {
        const BlowupResult res = blowup_iterate(spdiv, hdiv, div.r0, div.J0, C, 50);
        if (!res.blew_up || res.steps_to_blowup > 50) {
            out.fail(fmt("no blow-up within 50 steps at C=%.0e", C));
            return out;
        }
    }
    const presets::BlowupPreset conv = presets::blowup_convergent();
    const StepParams spconv{conv.problem.n, conv.problem.m, conv.problem.lambda,
                            conv.problem.sigma};
    auto hconv = [&](double r) { return h_hoelder(conv.problem, r).value; };
    const BlowupResult res = blowup_iterate(spconv, hconv, conv.r0, conv.J0, 1e-6, 200);
    if (res.blew_up || !(res.trajectory.back() < 10.0)) {
        out.fail("subcritical recurrence failed to stay bounded over 200 steps");
        return out;
    }
    return out;
}

// 6. Randomized envelope inequality: the worst ratio over ten thousand
//    seeded trials stays positive, and the running minimum stabilizes in the
//    first half for at least two of the three settings.
Outcome envelope_harness() {
    Outcome out;
    struct Setting {
        double alpha;
        double kappa;
        double span;
    };
    const std::size_t trials = 10000;
    const std::uint64_t seed = 2026;
    int stable = 0;
    for (const Setting& s : {Setting{0.25, 2.0, 2.0}, Setting{0.5, 1.5, 4.0},
                             Setting{1.0, 2.0, 2.0}}) {
        const Lemma34Result res = lemma34_harness(s.alpha, s.kappa, 1.0, s.span, trials, seed);
        if (!(res.min_ratio > 0.0) || !std::isfinite(res.min_ratio)) {
            out.fail(fmt("degenerate worst ratio at alpha=%.2f", s.alpha));
            return out;
        }
        if (res.argmin_trial < trials / 2) ++stable;
    }
    if (stable < 2) {
        out.fail(fmt("running minimum still moving late in %d of 3 settings", 3.0 - stable));
        return out;
    }
    return out;
}

// 7. Identical config and seed produce byte-identical reports.
Outcome reproducibility() {
    namespace fs = std::filesystem;
    Outcome out;
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    const fs::path base = "acceptance_scratch";
    fs::remove_all(base);

    RunConfig seeded;
    seeded.command = "lemma34";
    seeded.preset = "envelope:alpha=0.5,kappa=2,ratio=2,trials=2000";
    seeded.seed = 11;
    seeded.out_dir = (base / "envelope").string();

    RunConfig analytic;
    analytic.command = "criterion";
    analytic.preset = "example21_log:n=5,k=2,lambda=1.5,nu=-1";
    analytic.out_dir = (base / "criterion").string();

    for (const RunConfig& cfg : {seeded, analytic}) {
        std::ostringstream o1, e1, o2, e2;
        if (run_command(cfg, o1, e1) != 0) {
            out.fail("first run failed: " + e1.str());
            return out;
        }
        const std::string first = slurp(fs::path(cfg.out_dir) / "report.json");
        if (run_command(cfg, o2, e2) != 0) {
            out.fail("second run failed: " + e2.str());
            return out;
        }
        const std::string second = slurp(fs::path(cfg.out_dir) / "report.json");
        if (first.empty() || first != second) {
            out.fail("reports differ between identical runs of " + cfg.command);
            return out;
        }
    }
    fs::remove_all(base);
    return out;
}

}  // namespace

int main() {
    struct Row {
        const char* label;
        double budget_s;
        Outcome (*fn)();
    };
    const std::vector<Row> rows{
        {"power exponent boundary", 10.0, power_exponent_boundary},
        {"critical log boundary", 10.0, critical_log_boundary},
        {"windowed family and series law", 5.0, windowed_family_and_series},
        {"counterexample certificates", 60.0, counterexample_certificates},
        {"proof machinery on certified data", 30.0, proof_machinery},
        {"randomized envelope inequality", 30.0, envelope_harness},
        {"byte-identical reproducibility", 0.0, reproducibility},
    };

    int failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome res = rows[i].fn();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (rows[i].budget_s > 0.0 && secs >= rows[i].budget_s)
            res.fail(fmt("runtime %.1fs exceeds budget %.0fs", secs, rows[i].budget_s));
        std::printf("%s criterion %zu: %s [%.2fs]%s%s\n", res.ok ? "PASS" : "FAIL", i + 1,
                    rows[i].label, secs, res.detail.empty() ? "" : " -- ",
                    res.detail.c_str());
        if (!res.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
