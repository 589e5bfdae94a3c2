#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <liouville/counterexample.hpp>
#include <liouville/fd.hpp>
#include <liouville/weakform.hpp>

using namespace liouville;
using Catch::Approx;

TEST_CASE("smoothstep polynomials") {
    const auto c1 = smoothstep_coeffs(1);  // 3x^2 - 2x^3
    REQUIRE(c1.size() == 4);
    REQUIRE(c1[2] == Approx(3.0));
    REQUIRE(c1[3] == Approx(-2.0));

    REQUIRE(smoothstep(1, 0.5) == Approx(0.5).epsilon(1e-15));
    REQUIRE(smoothstep(2, 0.5) == Approx(0.5).epsilon(1e-15));
    REQUIRE(smoothstep(3, -0.1) == 0.0);
    REQUIRE(smoothstep(3, 1.1) == 1.0);

    // m vanishing derivatives at the ends: S(1-h) = 1 - O(h^{m+1})
    REQUIRE(1.0 - smoothstep(2, 1.0 - 1e-3) <= 2e-8);
    REQUIRE(smoothstep(2, 1e-3) <= 2e-8);
}

TEST_CASE("shell function matches the test function and its derivative") {
    TestFunction t;
    t.r1 = 1.0;
    t.r2 = 2.0;
    t.order = 3;
    const ShellFunction shell = ShellFunction::transition(t);
    for (double r : {1.01, 1.3, 1.5, 1.77, 1.99})
        REQUIRE(shell(r) == Approx(t(r)).epsilon(1e-13));

    const ShellFunction d1 = shell.ddr();
    const double h = 1e-6;
    for (double r : {1.2, 1.5, 1.8}) {
        const double fd = (shell(r + h) - shell(r - h)) / (2.0 * h);
        REQUIRE(d1(r) == Approx(fd).margin(1e-6));
    }
}

TEST_CASE("shell laplacians agree with finite differences") {
    TestFunction t;
    t.r1 = 1.0;
    t.r2 = 2.0;
    t.order = 4;
    const ShellFunction shell = ShellFunction::transition(t);
    auto phi = [&](double r) { return t(r); };

    const ShellFunction lap = shell.laplacian(3);
    for (double r : {1.25, 1.5, 1.75})
        REQUIRE(lap(r) == Approx(radial_laplacian_fd(phi, r, 3, 1e-3)).margin(1e-4));

    const ShellFunction bilap = shell.polyharmonic(2, 3);
    for (double r : {1.4, 1.5, 1.6}) {
        const double fd = radial_polyharmonic_fd(phi, r, 3, 2, 0.01);
        REQUIRE(bilap(r) == Approx(fd).epsilon(2e-3).margin(1e-3));
    }

    REQUIRE_THROWS_AS(shell.polyharmonic(0, 3), std::invalid_argument);
}

TEST_CASE("weak form demands enough smoothness") {
    TestFunction t;
    t.order = 1;
    auto one = [](double) { return 1.0; };
    REQUIRE_THROWS_WITH(verify_weak(one, one, 2.0, 1, 3, t),
                        Catch::Matchers::ContainsSubstring("raise its order"));
    TestFunction bad;
    bad.r1 = 2.0;
    bad.r2 = 1.0;
    REQUIRE_THROWS_AS(verify_weak(one, one, 2.0, 1, 3, bad), std::invalid_argument);
}

TEST_CASE("weak form holds with equality for the constructed pair") {
    CounterexampleOptions opt;
    opt.grid_count = 2048;
    opt.residual_tol = 1e-3;
    const CounterexampleCertificate cert = build_counterexample(3, 1, -2.0, 2.0, opt);
    auto u = [&](double r) { return cert.u(r); };
    auto b = [&](double r) { return cert.implied_b(r); };

    TestFunction t;
    t.r1 = 10.0;
    t.r2 = 100.0;
    t.order = 3;
    const WeakFormCheck eq = verify_weak(u, b, cert.lambda, cert.k, cert.n, t);
    REQUIRE(eq.holds);
    REQUIRE(std::abs(eq.rel_gap) <= 1e-5);
    REQUIRE(eq.lhs > 0.0);

    // halving the weight turns equality into strict inequality
    auto b_half = [&](double r) { return 0.5 * cert.implied_b(r); };
    const WeakFormCheck strict = verify_weak(u, b_half, cert.lambda, cert.k, cert.n, t);
    REQUIRE(strict.holds);
    REQUIRE(strict.rel_gap == Approx(0.5).margin(1e-3));

    // doubling it breaks the inequality, and the check reports that honestly
    auto b_double = [&](double r) { return 2.0 * cert.implied_b(r); };
    const WeakFormCheck broken = verify_weak(u, b_double, cert.lambda, cert.k, cert.n, t);
    REQUIRE_FALSE(broken.holds);
}

TEST_CASE("radial hoelder inequality with slack and tightness") {
    auto f = [](double r) { return r; };
    auto g = [](double r) { return 1.0 / (1.0 + r); };
    const HolderCheck loose = holder_annulus_check(f, g, 1.0, 2.0, 3, 2.0);
    REQUIRE(loose.holds);
    REQUIRE(loose.slack > 1.0);
    REQUIRE(loose.lhs > 0.0);

    // f^lambda proportional to g^{lambda'} pinches the inequality
    const HolderCheck tight = holder_annulus_check(f, f, 1.0, 2.0, 3, 2.0);
    REQUIRE(tight.holds);
    REQUIRE(tight.slack == Approx(1.0).epsilon(1e-9));

    REQUIRE_THROWS_AS(holder_annulus_check(f, g, 2.0, 1.0, 3, 2.0), std::invalid_argument);
    REQUIRE_THROWS_AS(holder_annulus_check(f, g, 1.0, 2.0, 3, 1.0), std::invalid_argument);
}
