#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <liouville/math_util.hpp>
#include <liouville/presets.hpp>
#include <liouville/proofsim.hpp>

using namespace liouville;
using Catch::Approx;

TEST_CASE("forcing mass reduces to the radial integral") {
    auto b = [](double r) { return 1.0 / (r * r); };
    auto u = [](double) { return 1.0; };
    const double J = forcing_mass(b, u, 2.0, 3, 5.0);
    REQUIRE(J == Approx(unit_sphere_area(3) * 5.0).epsilon(1e-9));
    REQUIRE_THROWS_AS(forcing_mass(b, u, 2.0, 3, 0.0), std::invalid_argument);
}

TEST_CASE("ring functional dominates the annulus functional") {
    ProblemSpec s;
    s.n = 3;
    s.m = 2;
    s.lambda = 2.0;
    s.sigma = 2.0;
    s.b = RadialProfile::product(
        {RadialProfile::power(-1.0), RadialProfile::log_power(1.0, true)});
    for (double r : log_spaced(2.0, 1e4, 100)) {
        const double h = h_hoelder(s, r).value;
        const double q = q_hoelder(s, r).value;
        REQUIRE(h >= q * (1.0 - 1e-9));
    }
}

TEST_CASE("doubling sequence for a cubic mass") {
    auto J = [](double r) { return r * r * r; };
    const std::vector<double> rhos = doubling_sequence(J, 1.0, 2.0);
    REQUIRE(rhos.size() == 4);
    REQUIRE(rhos[0] == Approx(1.0));
    REQUIRE(rhos[1] == Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-9));
    REQUIRE(rhos[2] == Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-9));
    REQUIRE(rhos[3] == Approx(2.0).epsilon(1e-9));
    for (std::size_t i = 0; i + 1 < rhos.size(); ++i)
        REQUIRE(J(rhos[i + 1]) == Approx(2.0 * J(rhos[i])).epsilon(1e-8));

    REQUIRE_THROWS_AS(doubling_sequence(J, 2.0, 1.0), std::invalid_argument);
    auto dead = [](double) { return 0.0; };
    REQUIRE_THROWS_AS(doubling_sequence(dead, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("two-regime partition of a geometric grid") {
    auto fast = [](double r) { return r * r; };
    const XiPartition p1 = xi_partition(fast, 1.0, 4.0, 10);  // step 2, ratio 4
    REQUIRE(p1.radii.size() == 11);
    REQUIRE(p1.xi1.size() == 10);
    REQUIRE(p1.xi2.empty());
    REQUIRE(p1.radii.back() == Approx(1024.0).epsilon(1e-12));

    auto slow = [](double r) { return std::pow(r, 0.1); };
    const XiPartition p2 = xi_partition(slow, 1.0, 4.0, 10);
    REQUIRE(p2.xi1.empty());
    REQUIRE(p2.xi2.size() == 10);

    REQUIRE_THROWS_AS(xi_partition(fast, 1.0, 4.0, 0), std::invalid_argument);
}

TEST_CASE("lemma hypothesis checks explain failures") {
    auto J = [](double r) { return r; };
    auto h = [](double) { return 1.0; };
    StepParams p;

    REQUIRE(lemma31_check(J, h, 2.0, 1.0, p).note == "radius hypothesis 0 < r1 < r2 fails");
    auto dead = [](double) { return 0.0; };
    REQUIRE(lemma31_check(dead, h, 1.0, 2.0, p).note == "mass hypothesis J(r1) > 0 fails");

    REQUIRE(lemma32_check(J, h, 1.0, 3.0, p).note ==
            "step hypothesis r2 <= sqrt(sigma) r1 fails");
    REQUIRE(lemma32_check(J, h, 1.0, 1.2, p).note ==
            "doubling hypothesis 2 J(r1) <= J(r2) fails");
    REQUIRE(lemma32_check(dead, h, 1.0, 1.2, p).note == "mass hypothesis J(r1) > 0 fails");

    REQUIRE(lemma33_check(J, h, 1.0, 1.2, p).note ==
            "step hypothesis r2 = sqrt(sigma) r1 fails");
    auto steep = [](double r) { return std::pow(r, 6.0); };
    REQUIRE(lemma33_check(steep, h, 1.0, std::sqrt(2.0), p).note ==
            "flatness hypothesis J(r2) <= 2 J(r1) fails");
}

TEST_CASE("fast-growth constant is scale-free on matched data") {
    // u = r, b = r^-3 gives J = omega r^2 / 2, doubling across a step of 4
    ProblemSpec s;
    s.n = 3;
    s.m = 2;
    s.lambda = 2.0;
    s.sigma = 16.0;
    s.b = RadialProfile::power(-3.0);
    StepParams p{s.n, s.m, s.lambda, s.sigma};
    const double omega = unit_sphere_area(3);
    auto J = [&](double r) { return omega * r * r / 2.0; };
    auto h = [&](double r) { return h_hoelder(s, r).value; };

    std::vector<double> constants;
    for (double r1 : {1.0, 10.0, 100.0, 1000.0}) {
        const LemmaCheck chk = lemma32_check(J, h, r1, 4.0 * r1, p);
        REQUIRE(chk.hypothesis_ok);
        REQUIRE(chk.lhs > 0.0);
        REQUIRE(chk.rhs > 0.0);
        constants.push_back(chk.fitted_constant);
    }
    for (double c : constants) REQUIRE(c == Approx(constants.front()).epsilon(1e-6));
}

TEST_CASE("slow-growth constant is scale-free on matched data") {
    // u = 1, b = r^-2 gives J = omega r, flat across a sqrt(2) step
    ProblemSpec s;
    s.n = 3;
    s.m = 2;
    s.lambda = 2.0;
    s.sigma = 2.0;
    s.b = RadialProfile::power(-2.0);
    StepParams p{s.n, s.m, s.lambda, s.sigma};
    const double omega = unit_sphere_area(3);
    auto J = [&](double r) { return omega * r; };
    auto h = [&](double r) { return h_hoelder(s, r).value; };

    std::vector<double> constants;
    for (double r1 : {1.0, 10.0, 100.0, 1000.0}) {
        const LemmaCheck chk = lemma33_check(J, h, r1, std::sqrt(2.0) * r1, p);
        REQUIRE(chk.hypothesis_ok);
        REQUIRE(chk.lhs > 0.0);
        REQUIRE(chk.rhs > 0.0);
        constants.push_back(chk.fitted_constant);
    }
    for (double c : constants) REQUIRE(c == Approx(constants.front()).epsilon(1e-6));
}

TEST_CASE("growth step inequality has a positive constant on growing mass") {
    ProblemSpec s;
    s.n = 3;
    s.m = 2;
    s.lambda = 2.0;
    s.sigma = 2.0;
    s.b = RadialProfile::power(-3.0);
    StepParams p{s.n, s.m, s.lambda, s.sigma};
    const double omega = unit_sphere_area(3);
    auto J = [&](double r) { return omega * r * r / 2.0; };
    auto h = [&](double r) { return h_hoelder(s, r).value; };
    const LemmaCheck chk = lemma31_check(J, h, 10.0, 20.0, p);
    REQUIRE(chk.hypothesis_ok);
    REQUIRE(chk.fitted_constant > 0.0);
}

TEST_CASE("blow-up recurrence escapes for supercritical forcing") {
    const presets::BlowupPreset pre = presets::blowup_divergent();
    StepParams p{pre.problem.n, pre.problem.m, pre.problem.lambda, pre.problem.sigma};
    auto h = [&](double r) { return h_hoelder(pre.problem, r).value; };
    for (double C : {1e-6, 1e-3, 1.0}) {
        const BlowupResult res = blowup_iterate(p, h, pre.r0, pre.J0, C, 50);
        REQUIRE(res.blew_up);
        REQUIRE(res.steps_to_blowup >= 1);
        REQUIRE(res.steps_to_blowup <= 50);
        REQUIRE(res.trajectory.size() == std::size_t(res.steps_to_blowup) + 1);
    }
}

TEST_CASE("blow-up recurrence stays bounded for subcritical forcing") {
    const presets::BlowupPreset pre = presets::blowup_convergent();
    StepParams p{pre.problem.n, pre.problem.m, pre.problem.lambda, pre.problem.sigma};
    auto h = [&](double r) { return h_hoelder(pre.problem, r).value; };
    const BlowupResult res = blowup_iterate(p, h, pre.r0, pre.J0, 1e-6, 200);
    REQUIRE_FALSE(res.blew_up);
    REQUIRE(res.trajectory.size() == 201);
    REQUIRE(res.trajectory.back() < 1.001);
    // monotone non-decreasing mass
    for (std::size_t i = 0; i + 1 < res.trajectory.size(); ++i)
        REQUIRE(res.trajectory[i + 1] >= res.trajectory[i]);
}

TEST_CASE("window minimum of a piecewise envelope") {
    PiecewisePsi psi;
    psi.edges = {1.0, 2.0, 4.0};
    psi.values = {5.0, 3.0};
    REQUIRE(psi_window_min(psi, 1.5, 3.0) == Approx(3.0));
    REQUIRE(psi_window_min(psi, 2.5, 3.5) == Approx(3.0));
    REQUIRE(psi_window_min(psi, 0.5, 1.2) == Approx(5.0));
}

TEST_CASE("envelope ratio of a constant profile in closed form") {
    // for psi = c on [r1, nu r1] the ratio is (nu-1)^{1/alpha} /
    // (alpha (nu^{1/alpha} - 1)), independent of c and r1
    auto oracle = [](double alpha, double nu) {
        return std::pow(nu - 1.0, 1.0 / alpha) / (alpha * (std::pow(nu, 1.0 / alpha) - 1.0));
    };
    for (double alpha : {0.25, 0.5, 1.0}) {
        for (double nu : {2.0, 3.0, 4.0}) {
            for (double r1 : {1.0, 7.0}) {
                PiecewisePsi psi;
                psi.edges = {r1, nu * r1};
                psi.values = {2.5};
                const EnvelopeRatio er = envelope_ratio(psi, alpha, 2.0);
                REQUIRE(er.lhs > 0.0);
                REQUIRE(er.rhs > 0.0);
                REQUIRE(er.ratio == Approx(oracle(alpha, nu)).epsilon(1e-10));
            }
        }
    }
    PiecewisePsi psi;
    psi.edges = {1.0, 2.0};
    psi.values = {1.0};
    REQUIRE_THROWS_AS(envelope_ratio(psi, 0.0, 2.0), std::invalid_argument);
    REQUIRE_THROWS_AS(envelope_ratio(psi, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("envelope harness is deterministic and strictly positive") {
    const Lemma34Result a = lemma34_harness(0.5, 2.0, 1.0, 2.0, 500, 42);
    const Lemma34Result b = lemma34_harness(0.5, 2.0, 1.0, 2.0, 500, 42);
    REQUIRE(a.min_ratio == b.min_ratio);
    REQUIRE(a.argmin_trial == b.argmin_trial);
    REQUIRE(a.min_ratio > 0.0);
    REQUIRE(std::isfinite(a.min_ratio));

    const Lemma34Result c = lemma34_harness(0.5, 2.0, 1.0, 2.0, 500, 43);
    REQUIRE(c.min_ratio > 0.0);
    REQUIRE_THROWS_AS(lemma34_harness(0.5, 2.0, 2.0, 1.0, 10, 1), std::invalid_argument);
}
