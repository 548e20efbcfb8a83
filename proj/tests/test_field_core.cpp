#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "intertwine/parallel.hpp"
#include "intertwine/profile.hpp"
#include "intertwine/quadrature.hpp"
#include "intertwine/spline.hpp"
#include "intertwine/stencil.hpp"

using namespace itw;

namespace {
const double PI = 3.14159265358979323846;

ComplexField gaussian_state(const Grid1D& g) {
    // normalized ground-state Gaussian pi^{-1/4} e^{-x^2/2}
    return sample_field(g, [](double x) { return cplx(std::pow(PI, -0.25) * std::exp(-x * x / 2), 0.0); });
}
} // namespace

TEST_CASE("grid construction and failure modes") {
    Grid1D g = make_grid(-10.0, 10.0, 2001);
    CHECK(g.h == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(std::abs(g.point(1000)) < 1e-12);
    CHECK(g.point(0) == -10.0);
    CHECK(g.point(2000) == doctest::Approx(10.0).epsilon(1e-15));

    Grid1D q = make_grid(0.5, 8.5, 65);
    CHECK(q.h == doctest::Approx(0.125));

    CHECK_THROWS_WITH_AS(make_grid(3.0, 3.0, 100), doctest::Contains("invalid-extent"), LabError);
    CHECK_THROWS_WITH_AS(make_grid(5.0, 1.0, 100), doctest::Contains("invalid-extent"), LabError);
    CHECK_THROWS_WITH_AS(make_grid(0.0, 1.0, 8), doctest::Contains("too-few-points"), LabError);

    // half-line safety margin: x_min must be at least ten spacings
    Grid1D hl = make_grid(0.5, 10.0, 1024);
    CHECK_NOTHROW(require_halfline(hl));
    Grid1D bad = make_grid(0.05, 10.0, 101);
    CHECK_THROWS_WITH_AS(require_halfline(bad), doctest::Contains("invalid-extent"), LabError);
}

TEST_CASE("derivatives of smooth fields hit fourth-order accuracy") {
    Grid1D g = make_grid(-10.0, 10.0, 2001);
    ComplexField s = sample_field(g, [](double x) { return cplx(std::sin(x), 0.0); });

    ComplexField d1 = differentiate(s, 1);
    ComplexField d2 = differentiate(s, 2);
    CHECK(d1.unreliable_band == 4);
    CHECK(differentiate(d1, 1).unreliable_band == 8);

    double e1 = 0, e2 = 0, e1_edge = 0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.point(i);
        const double err1 = std::abs(d1.values[i] - cplx(std::cos(x), 0));
        const double err2 = std::abs(d2.values[i] + cplx(std::sin(x), 0));
        if (i >= 4 && i < g.n - 4) {
            e1 = std::max(e1, err1);
            e2 = std::max(e2, err2);
        } else {
            e1_edge = std::max(e1_edge, err1);
        }
    }
    CHECK(e1 < 1e-9);
    CHECK(e2 < 1e-9);
    CHECK(e1_edge < 1e-7);

    // low orders are best at small h; the h^-order roundoff amplification in
    // d3/d4 wants a coarser grid
    Grid1D f = make_grid(-1.0, 1.0, 1001);
    ComplexField ex = sample_field(f, [](double x) { return cplx(std::exp(x), 0.0); });
    for (int order : {1, 2}) {
        ComplexField d = differentiate(ex, order);
        double emax = 0;
        for (int i = 0; i < f.n; ++i)
            emax = std::max(emax, std::abs(d.values[i] - ex.values[i]));
        CHECK_MESSAGE(emax < 1e-8, "order ", order);
    }
    Grid1D fc = make_grid(-1.0, 1.0, 101);
    ComplexField exc = sample_field(fc, [](double x) { return cplx(std::exp(x), 0.0); });
    for (int order : {3, 4}) {
        ComplexField d = differentiate(exc, order);
        double emax = 0;
        for (int i = 0; i < fc.n; ++i)
            emax = std::max(emax, std::abs(d.values[i] - exc.values[i]));
        CHECK_MESSAGE(emax < 1e-5, "order ", order);
    }

    CHECK_THROWS_WITH_AS(differentiate(s, 5), doctest::Contains("unsupported-order"), LabError);
    CHECK_THROWS_WITH_AS(differentiate(s, 0), doctest::Contains("unsupported-order"), LabError);
    std::vector<double> tiny(8, 1.0);
    CHECK_THROWS_WITH_AS(differentiate_samples(tiny, 0.1, 1), doctest::Contains("too-few-points"),
                         LabError);
}

TEST_CASE("derivative error drops by ~16x when h halves") {
    auto interior_err = [](int n) {
        Grid1D g = make_grid(-2.0, 2.0, n);
        ComplexField f = sample_field(g, [](double x) { return cplx(std::exp(x), 0.0); });
        ComplexField d = differentiate(f, 2);
        double e = 0;
        for (int i = 4; i < g.n - 4; ++i)
            e = std::max(e, std::abs(d.values[i] - f.values[i]));
        return e;
    };
    const double coarse = interior_err(201), fine = interior_err(401);
    const double ratio = coarse / fine;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("inner product: Simpson accuracy and sesquilinearity") {
    Grid1D g = make_grid(-10.0, 10.0, 2001);
    ComplexField psi = gaussian_state(g);
    CHECK(std::abs(inner_product(psi, psi).real() - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(psi, psi).imag()) < 1e-15);

    ComplexField f = sample_field(g, [](double x) { return std::exp(cplx(0, 0.7 * x)) * std::exp(-x * x / 3); });
    ComplexField h = sample_field(g, [](double x) { return (cplx(x, 1.0)) * std::exp(-x * x / 2); });

    const cplx fg = inner_product(f, h), gf = inner_product(h, f);
    CHECK(std::abs(fg - std::conj(gf)) < 1e-14 * std::abs(fg));

    const cplx alpha(0.3, -1.2);
    CHECK(std::abs(inner_product(alpha * f, h) - std::conj(alpha) * fg) < 1e-13);
    CHECK(std::abs(inner_product(f, alpha * h) - alpha * fg) < 1e-13);

    // odd integrand integrates to zero on the symmetric grid
    ComplexField odd = sample_field(g, [](double x) { return cplx(x * std::exp(-x * x), 0.0); });
    CHECK(std::abs(integrate_window(odd, 0, g.n - 1)) < 1e-12);

    Grid1D other = make_grid(-10.0, 10.0, 1001);
    ComplexField psi2 = gaussian_state(other);
    CHECK_THROWS_WITH_AS(inner_product(psi, psi2), doctest::Contains("grid-mismatch"), LabError);

    // even point count: trapezoid patch on the last interval still lands close
    Grid1D ev = make_grid(-10.0, 10.0, 2000);
    ComplexField pe = gaussian_state(ev);
    CHECK(std::abs(inner_product(pe, pe).real() - 1.0) < 1e-8);
}

TEST_CASE("interior norms exclude the unreliable band") {
    Grid1D g = make_grid(-5.0, 5.0, 501);
    ComplexField f = gaussian_state(g);
    f.values[0] = cplx(100.0, 0.0); // corrupt the edge
    f.values[g.n - 1] = cplx(-100.0, 0.0);
    CHECK(l2_norm_interior(f, 4) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(l2_norm(f) > 10.0);
}

TEST_CASE("profile jets match finite differences for every kind") {
    auto check_jets = [](const Profile& p, double u) {
        const double dh = 1e-3;
        auto num = [&](int k) {
            // central differences on the value for d1/d2, on d2 for d3/d4
            if (k == 1) return (p(u + dh) - p(u - dh)) / (2 * dh);
            if (k == 2) return (p(u + dh) - 2 * p(u) + p(u - dh)) / (dh * dh);
            if (k == 3) return (p.d(2, u + dh) - p.d(2, u - dh)) / (2 * dh);
            return (p.d(2, u + dh) - 2 * p.d(2, u) + p.d(2, u - dh)) / (dh * dh);
        };
        for (int k = 1; k <= 4; ++k) {
            const double scale = std::max(1.0, std::abs(p.d(k, u)));
            CHECK_MESSAGE(std::abs(p.d(k, u) - num(k)) < 2e-5 * scale, p.describe(), " order ", k);
        }
    };

    check_jets(Profile::polynomial({1.0, -0.5, 0.25, 2.0, -0.125, 0.0625}), 0.7);
    check_jets(Profile::exponential(1.3, -0.8), 0.4);
    check_jets(Profile::trig(0.9, 2.0, 0.3), 1.1);
    check_jets(Profile::cosh_p(0.70710678, 1.0), 0.6);
    check_jets(Profile::sinh_p(1.1, 0.7), -0.9);
    check_jets(Profile::power(2.0, -1.0), 1.7);
    check_jets(Profile::power(1.0, 1.5), 2.3);
    check_jets(Profile::sum(Profile::exponential(1, 1), Profile::trig(1, 3, 0)), 0.35);
    check_jets(Profile::product(Profile::exponential(1, -1), Profile::trig(1, 2, 0.5)), 0.8);

    Profile rho = Profile::exponential(1.0, 1.0);
    CHECK(rho(0.0) == doctest::Approx(1.0));
    CHECK(rho.d(1, 0.5) == doctest::Approx(std::exp(0.5)));
    CHECK_FALSE(rho.reduced_accuracy());

    CHECK_THROWS_WITH_AS(Profile::power(1.0, 0.5).jet(-2.0), doctest::Contains("window-violation"),
                         LabError);
    CHECK_THROWS_AS(Profile().jet(0.0), LabError);
}

TEST_CASE("tabulated profiles interpolate with a reduced-accuracy flag") {
    std::vector<double> us, vs;
    for (int i = 0; i <= 600; ++i) {
        const double u = i * 3.0 / 600;
        us.push_back(u);
        vs.push_back(std::sin(u));
    }
    Profile tab = Profile::tabulated(us, vs);
    CHECK(tab.reduced_accuracy());
    CHECK(std::abs(tab(1.234) - std::sin(1.234)) < 1e-8);
    CHECK(std::abs(tab.d(1, 1.234) - std::cos(1.234)) < 1e-5);
    CHECK(std::abs(tab.d(2, 1.5) + std::sin(1.5)) < 1e-4);
    CHECK(tab.jet(1.0).reduced);
    CHECK_THROWS_WITH_AS(tab.jet(3.5), doctest::Contains("window-violation"), LabError);

    // reduced flag propagates through algebra
    CHECK(Profile::sum(tab, Profile::constant(1.0)).reduced_accuracy());
    CHECK(Profile::product(tab, Profile::constant(2.0)).reduced_accuracy());
}

TEST_CASE("cumulative integral cache") {
    CumulativeIntegral arctan([](double t) { return 1.0 / (1.0 + t * t); }, 0.0, 1e-3);
    CHECK(std::abs(arctan.to(1.0) - PI / 4) < 1e-10);
    CHECK(std::abs(arctan.to(-1.0) + PI / 4) < 1e-10);
    CHECK(std::abs(arctan.to(0.5) - std::atan(0.5)) < 1e-10);
    // a second query of the same point comes from cache and matches exactly
    const double v = arctan.to(1.0);
    CHECK(arctan.to(1.0) == v);

    // exponential time map used by the scaling family: tau(t) = (1 - e^{-2t})/2
    CumulativeIntegral tau([](double t) { return std::exp(-2.0 * t); }, 0.0, 1e-3);
    CHECK(std::abs(tau.to(0.5) - (1.0 - std::exp(-1.0)) / 2) < 1e-12);
}

TEST_CASE("complex spline interpolates oscillatory data") {
    std::vector<double> xs;
    std::vector<cplx> ys;
    for (int i = 0; i <= 400; ++i) {
        const double x = -2.0 + i * 4.0 / 400;
        xs.push_back(x);
        ys.push_back(std::exp(cplx(0.0, 2.0 * x)));
    }
    ComplexSpline s(xs, ys);
    for (double x : {-1.37, 0.123, 1.9}) {
        CHECK(std::abs(s(x) - std::exp(cplx(0.0, 2.0 * x))) < 1e-7);
    }
    CHECK(s.in_range(0.0));
    CHECK_FALSE(s.in_range(2.5));
}

TEST_CASE("parallel loop covers every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(1000, [&](int i) { hits[i] += i; });
    long sum = 0;
    for (int i = 0; i < 1000; ++i) {
        sum += hits[i];
        CHECK(hits[i] == i);
    }
    CHECK(sum == 999 * 1000 / 2);
    CHECK(worker_count() >= 1);
}
