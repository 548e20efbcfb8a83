#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "intertwine/eigen.hpp"
#include "intertwine/ode.hpp"
#include "intertwine/quadrature.hpp"

using namespace itw;

TEST_CASE("riccati flows reproduce closed-form solutions") {
    SUBCASE("f = 1/(2x) for the quartic-oscillator flow, m=1, a=-1") {
        Grid1D g = make_grid(0.5, 8.5, 801);
        OdeSolution sol = integrate_riccati(RiccatiKind::painleve4, {1.0, -1.0}, 1.0, 0.5, g);
        CHECK(sol.lo == 0);
        CHECK(sol.hi == g.n - 1);
        double emax = 0;
        for (int i = sol.lo; i <= sol.hi; ++i)
            emax = std::max(emax, std::abs(sol.value_at_index(i) - 1.0 / (2 * g.point(i))));
        CHECK(emax < 1e-6);
        CHECK(sol.max_step_error < 1e-6);
    }
    SUBCASE("W = -1/x for the quadratic flow, k=0") {
        Grid1D g = make_grid(0.5, 10.0, 951);
        OdeSolution sol = integrate_riccati(RiccatiKind::painleve2, {0.0}, 1.0, -1.0, g);
        double emax = 0;
        for (int i = sol.lo; i <= sol.hi; ++i)
            emax = std::max(emax, std::abs(sol.value_at_index(i) + 1.0 / g.point(i)));
        CHECK(emax < 1e-6);
    }
    SUBCASE("f = x for the oscillating-family flow, beta=8, d=1") {
        // perturbations grow like e^{2x^2} along this flow, so the window is
        // kept where roundoff stays below the tolerance
        Grid1D g = make_grid(-2.5, 2.5, 501);
        OdeSolution sol = integrate_riccati(RiccatiKind::eq41, {8.0, 1.0}, 0.0, 0.0, g);
        REQUIRE(sol.lo == 0);
        REQUIRE(sol.hi == g.n - 1);
        double emax = 0;
        for (int i = 0; i < g.n; ++i)
            emax = std::max(emax, std::abs(sol.value_at_index(i) - g.point(i)));
        CHECK(emax < 1e-9);
    }
}

TEST_CASE("blow-ups truncate the covered range and are recorded") {
    // f' = 2 f^2 from f(0)=1 has a pole at x = 1/2
    Grid1D g = make_grid(-2.0, 2.0, 401);
    OdeSolution sol = integrate_riccati(RiccatiKind::eq41, {0.0, 0.0}, 0.0, 1.0, g);
    CHECK(sol.truncated_right);
    CHECK_FALSE(sol.truncated_left);
    CHECK(sol.hi < g.n - 1);
    CHECK(g.point(sol.hi) < 0.52);
    CHECK(g.point(sol.hi) > 0.4);
    CHECK(sol.lo == 0);
    CHECK(sol.covers(0));
    CHECK_FALSE(sol.covers(g.n - 1));

    CHECK_THROWS_WITH_AS(integrate_riccati(RiccatiKind::eq41, {0.0, 0.0}, 0.0, 2e8, g),
                         doctest::Contains("blow-up-at-start"), LabError);

    CHECK_THROWS_WITH_AS(integrate_riccati(RiccatiKind::eq41, {0.0, 0.0}, 0.00123, 1.0, g),
                         doctest::Contains("invalid-extent"), LabError);

    CHECK_THROWS_WITH_AS(riccati_kind_from_string("heat-flow"), doctest::Contains("invalid-kind"),
                         LabError);
    CHECK(riccati_kind_from_string("painleve4-riccati") == RiccatiKind::painleve4);
    CHECK(riccati_kind_from_string("painleve2-riccati") == RiccatiKind::painleve2);
    CHECK(riccati_kind_from_string("eq41-riccati") == RiccatiKind::eq41);
}

TEST_CASE("structural residuals vanish on closed-form shapes") {
    SUBCASE("quartic-oscillator equation on f = 1/(2x)") {
        ShapeFn f(Profile::power(0.5, -1.0));
        Grid1D s = make_grid(0.5, 8.5, 201);
        OdeResidual r = ode_residual(ResidualKind::painleve4, f, s, {1.0, -1.0, -1.0});
        CHECK(r.max_abs < 1e-12);
        // wrong constants leave an O(1) defect
        OdeResidual bad = ode_residual(ResidualKind::painleve4, f, s, {1.0, 0.0, 0.0});
        CHECK(bad.max_abs > 0.1);
    }
    SUBCASE("cubic equation on W = 1/x") {
        ShapeFn w(Profile::power(1.0, -1.0));
        Grid1D s = make_grid(0.5, 10.0, 191);
        OdeResidual r = ode_residual(ResidualKind::painleve2, w, s, {1.0, -4.0});
        CHECK(r.max_abs < 1e-12);
    }
    SUBCASE("third-order consistency equation on f = x") {
        ShapeFn f(Profile::linear(0.0, 1.0));
        Grid1D s = make_grid(0.5, 4.0, 176);
        OdeResidual r = ode_residual(ResidualKind::eq40, f, s, {8.0, 0.0, 0.0, 0.0});
        CHECK(r.max_abs < 1e-9);
    }
    SUBCASE("fourth-derivative eigenequation and its first integral") {
        ShapeFn f1(Profile::cosh_p(1.0 / std::sqrt(2.0), 1.0));
        Grid1D s = make_grid(-3.0, 3.0, 121);
        CHECK(ode_residual(ResidualKind::eq411, f1, s, {1.0}).max_abs < 1e-12);
        CHECK(ode_residual(ResidualKind::first_integral, f1, s, {1.0, 0.5, 0.5}).max_abs < 1e-12);

        // unit amplitude satisfies the linear equation but not the first
        // integral: the amplitude is part of the data
        ShapeFn unit(Profile::cosh_p(1.0, 1.0));
        CHECK(ode_residual(ResidualKind::eq411, unit, s, {1.0}).max_abs < 1e-12);
        OdeResidual fi = ode_residual(ResidualKind::first_integral, unit, s, {1.0, 0.5, 0.5});
        CHECK(fi.max_abs > 0.9);
    }
    SUBCASE("tabulated shapes lack the fourth derivative") {
        std::vector<double> us, vs;
        for (int i = 0; i <= 200; ++i) {
            us.push_back(i * 0.01);
            vs.push_back(std::cosh(us.back()));
        }
        ShapeFn tab{Profile::tabulated(us, vs)};
        Grid1D s = make_grid(0.1, 1.9, 37);
        CHECK_THROWS_WITH_AS(ode_residual(ResidualKind::eq411, tab, s, {1.0}),
                             doctest::Contains("insufficient-derivative-order"), LabError);
        CHECK_NOTHROW(ode_residual(ResidualKind::first_integral, tab, s, {1.0, 0.5, 0.5}));
    }
}

TEST_CASE("flow trajectories satisfy their structural equation to roundoff") {
    // integrate with generic constants, then check the full second-order
    // equation with d = -a^2 along the numeric trajectory
    Grid1D g = make_grid(0.5, 5.0, 451);
    OdeSolution sol = integrate_riccati(RiccatiKind::painleve4, {1.0, 2.0}, 0.5, 0.3, g);
    ShapeFn shape = shape_from_solution(sol);
    Grid1D s = make_grid(g.point(sol.lo), g.point(sol.hi), 101);
    OdeResidual r = ode_residual(ResidualKind::painleve4, shape, s, {1.0, 2.0, -4.0});
    CHECK(r.max_abs < 1e-9);

    // same for the quadratic flow: W' = W^2 + kx implies the cubic equation
    // with mtilde = k/2 and constant k
    OdeSolution ws = integrate_riccati(RiccatiKind::painleve2, {1.0}, 1.0, -1.2, make_grid(0.5, 4.0, 351));
    ShapeFn wsh = shape_from_solution(ws);
    Grid1D s2 = make_grid(ws.grid.point(ws.lo), ws.grid.point(ws.hi), 89);
    CHECK(ode_residual(ResidualKind::painleve2, wsh, s2, {0.5, 1.0}).max_abs < 1e-9);
}

TEST_CASE("stationary eigensolver hits the oscillator and box spectra") {
    Grid1D g = make_grid(-10.0, 10.0, 2001);
    EigenResult osc = stationary_eigensolve([](double y) { return y * y - 1.0; }, g, 3);
    REQUIRE(osc.energies.size() == 3);
    CHECK(std::abs(osc.energies[0] - 0.0) < 2e-4);
    CHECK(std::abs(osc.energies[1] - 2.0) < 5e-4);
    CHECK(std::abs(osc.energies[2] - 4.0) < 1e-3);
    CHECK(std::abs(inner_product(osc.states[0], osc.states[0]).real() - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(osc.states[0], osc.states[1])) < 1e-8);
    CHECK(std::abs(inner_product(osc.states[1], osc.states[2])) < 1e-8);

    // eigenvector quality: compare against the closed-form ground state
    EigenResult exact = oscillator_eigenpairs(g, 2, 2);
    double dev = 0;
    for (int i = 0; i < g.n; ++i)
        dev = std::max(dev, std::abs(osc.states[0].values[i] - exact.states[0].values[i]));
    CHECK(dev < 1e-4);

    Grid1D box = make_grid(0.0, 3.14159265358979323846, 1001);
    EigenResult be = stationary_eigensolve([](double) { return 0.0; }, box, 4);
    for (int n = 0; n < 4; ++n) {
        const double expect = (n + 1.0) * (n + 1.0);
        CHECK(std::abs(be.energies[n] - expect) < 1e-3 * expect);
    }

    // repulsive inverse-square barrier on the half line: strictly positive spectrum
    Grid1D hl = make_grid(0.1, 10.0, 991);
    require_halfline(hl);
    EigenResult rep = stationary_eigensolve([](double y) { return 2.0 / (y * y); }, hl, 5);
    for (double e : rep.energies) CHECK(e > 0.0);

    CHECK_THROWS_WITH_AS(stationary_eigensolve([](double) { return 0.0; }, g, 21),
                         doctest::Contains("too-many-states"), LabError);
}

TEST_CASE("discrete ground-state error falls fourfold when the grid doubles") {
    auto e0_err = [](int n) {
        Grid1D g = make_grid(-10.0, 10.0, n);
        EigenResult r = stationary_eigensolve([](double y) { return y * y - 1.0; }, g, 1);
        return std::abs(r.energies[0]);
    };
    const double ratio = e0_err(501) / e0_err(1001);
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
}

TEST_CASE("closed-form oscillator eigenpairs") {
    Grid1D g = make_grid(-10.0, 10.0, 2001);
    EigenResult lower = oscillator_eigenpairs(g, 2, 3);
    CHECK(lower.energies[0] == 0.0);
    CHECK(lower.energies[1] == 2.0);
    CHECK(lower.energies[2] == 4.0);
    EigenResult upper = oscillator_eigenpairs(g, 1, 2);
    CHECK(upper.energies[0] == 2.0);
    CHECK(upper.energies[1] == 4.0);

    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(inner_product(lower.states[i], lower.states[i]).real() - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(lower.states[0], lower.states[2])) < 1e-12);

    // explicit first excited state: sqrt(2) pi^{-1/4} y e^{-y^2/2}
    const double c = std::sqrt(2.0) * std::pow(3.14159265358979323846, -0.25);
    double dev = 0;
    for (int i = 0; i < g.n; ++i) {
        const double y = g.point(i);
        dev = std::max(dev, std::abs(lower.states[1].values[i] - cplx(c * y * std::exp(-y * y / 2), 0)));
    }
    CHECK(dev < 1e-14);
}
