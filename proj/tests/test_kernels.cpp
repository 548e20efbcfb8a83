#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "intertwine/canonicalize.hpp"
#include "intertwine/kernels.hpp"
#include "intertwine/quadrature.hpp"
#include "intertwine/symmetry.hpp"

using namespace itw;

namespace {

ComplexField gaussian_field(const Grid1D& g, double center, double width, double k) {
    return sample_field(g, [=](double x) {
        const double u = (x - center) / width;
        return std::exp(cplx(-u * u, k * x));
    });
}

double rel_interior(const ComplexField& got, const ComplexField& want, int band) {
    ComplexField diff = got - want;
    return l2_norm_interior(diff, band) / l2_norm_interior(want, band);
}

} // namespace

TEST_CASE("first-order charge maps the oscillator pair's states exactly") {
    // q = d/dx + x sends x e^{-x^2/2} (first excited state of the lower
    // partner) to e^{-x^2/2} up to normalization: (1 - x^2 + x^2) e^{-x^2/2}.
    const Grid1D g = make_grid(-10.0, 10.0, 2001);
    ChargeSpec q = first_order_charge([](double, double) { return cplx(1.0, 0.0); },
                                      [](double x, double) { return cplx(x, 0.0); },
                                      [](double, double) { return cplx(0.0, 0.0); });
    ComplexField psi = sample_field(g, [](double x) { return x * std::exp(-0.5 * x * x); });
    ComplexField want = sample_field(g, [](double x) { return std::exp(-0.5 * x * x); });
    ComplexField got = apply_charge(q, psi, 0.0);
    CHECK(rel_interior(got, want, got.unreliable_band) < 1e-8);

    // e^{-x^2/2} spans the kernel of the charge itself
    ComplexField zero = apply_charge(q, want, 0.0);
    CHECK(l2_norm_interior(zero, zero.unreliable_band) < 1e-8);
}

TEST_CASE("adjoint is an exact involution on the stored coefficients") {
    ChargeSpec q1 = first_order_charge(
        [](double x, double t) { return cplx(std::cos(x) + t, 0.5 * x); },
        [](double x, double t) { return cplx(x * t, std::sin(x)); },
        [](double x, double) { return cplx(-std::sin(x), 0.5); });
    ChargeSpec q2 = second_order_charge(
        [](double t) { return 1.0 + 0.1 * t; },
        [](double x, double t) { return cplx(x * x - t, 0.3 * x); },
        [](double x, double) { return cplx(2.0 * x, 0.3); },
        [](double x, double t) { return cplx(std::sin(x + t), x); }, false);

    for (const ChargeSpec& q : {q1, q2}) {
        ChargeSpec qq = adjoint_charge(adjoint_charge(q));
        for (double x : {-1.7, 0.4, 2.2}) {
            for (double t : {0.0, 0.9}) {
                if (q.order == 1) {
                    CHECK(qq.c1(x, t) == q.c1(x, t));
                    CHECK(qq.c0(x, t) == q.c0(x, t));
                    CHECK(qq.c1x(x, t) == q.c1x(x, t));
                } else {
                    CHECK(qq.g2(t) == q.g2(t));
                    CHECK(qq.f(x, t) == q.f(x, t));
                    CHECK(qq.w(x, t) == q.w(x, t));
                }
            }
        }
    }
}

TEST_CASE("adjoint satisfies the integration-by-parts pairing") {
    const Grid1D g = make_grid(-12.0, 12.0, 2401);
    ComplexField phi = gaussian_field(g, 0.5, 1.0, 0.3);
    ComplexField psi = gaussian_field(g, -0.3, 1.2, -0.8);

    ChargeSpec q1 = first_order_charge(
        [](double x, double t) { return cplx(std::cos(0.3 * x) + 2.0 + t, 0.2 * x); },
        [](double x, double) { return cplx(x, std::sin(x)); },
        [](double x, double) { return cplx(-0.3 * std::sin(0.3 * x), 0.2); });
    ChargeSpec q2 = second_order_charge(
        [](double) { return 0.7; },
        [](double x, double) { return cplx(0.2 * x * x, 0.1 * x); },
        [](double x, double) { return cplx(0.4 * x, 0.1); },
        [](double x, double) { return cplx(std::cos(x), 0.5 * x); }, false);

    for (const ChargeSpec& q : {q1, q2}) {
        ChargeSpec qd = adjoint_charge(q);
        const cplx lhs = inner_product(phi, apply_charge(q, psi, 0.4));
        const cplx rhs = inner_product(apply_charge(qd, phi, 0.4), psi);
        CHECK(std::abs(lhs - rhs) < 1e-6 * std::abs(lhs));
    }
}

TEST_CASE("evolution residual vanishes on exact solutions") {
    const Grid1D g = make_grid(-10.0, 10.0, 1001);

    SUBCASE("free plane wave, unitary kind") {
        const double k = 1.0;
        const TimeGrid tg = make_time_grid(0.0, 1e-3, 6);
        Snapshots s = sample_snapshots(
            g, tg, [k](double x, double t) { return std::exp(cplx(0.0, k * x - k * k * t)); });
        ResidualSeries r = schrodinger_residual([](double, double) { return 0.0; }, s);
        CHECK(r.max_l2 < 2e-6);
        CHECK(static_cast<int>(r.times.size()) == tg.snapshots() - 2);
    }

    SUBCASE("oscillator ground state, both kinds") {
        const TimeGrid tg = make_time_grid(0.0, 1e-3, 4);
        auto still = [](double x, double) { return cplx(std::exp(-0.5 * x * x), 0.0); };
        auto V = [](double x, double) { return x * x - 1.0; };
        Snapshots su = sample_snapshots(g, tg, still, EvolutionKind::schrodinger);
        CHECK(schrodinger_residual(V, su).max_l2 < 1e-6);
        Snapshots sd = sample_snapshots(g, tg, still, EvolutionKind::diffusion);
        CHECK(evolution_residual(V, sd).max_l2 < 1e-6);
    }

    SUBCASE("wrong potential is loud") {
        const TimeGrid tg = make_time_grid(0.0, 1e-3, 4);
        Snapshots s = sample_snapshots(
            g, tg, [](double x, double) { return cplx(std::exp(-0.5 * x * x), 0.0); });
        ResidualSeries r = schrodinger_residual([](double x, double) { return x * x; }, s);
        CHECK(r.max_l2 > 0.5);
        ComplexField defect = evolution_defect([](double x, double) { return x * x; }, s, 1);
        CHECK(l2_norm_interior(defect, r.band) > 0.5);
    }
}

TEST_CASE("symmetry applier composes factors right-to-left") {
    const Grid1D g = make_grid(-10.0, 10.0, 1201);
    auto V = [](double x, double) { return x * x - 1.0; };
    // first excited state of V: energy 2
    ComplexField phi1 = sample_field(g, [](double x) { return x * std::exp(-0.5 * x * x); });

    SUBCASE("single Hamiltonian factor reproduces the eigenvalue") {
        SymmetryOpSpec op;
        op.terms.push_back(SymTerm{nullptr, {SymFactor::ham(V, 1)}});
        ComplexField got = apply_symmetry(op, phi1, 0.0);
        ComplexField want = 2.0 * phi1;
        CHECK(rel_interior(got, want, got.unreliable_band) < 1e-7);
    }

    SUBCASE("identity term and scalar coefficients") {
        SymmetryOpSpec op;
        op.terms.push_back(SymTerm{[](double t) { return cplx(0.0, t); }, {}});
        op.terms.push_back(SymTerm{nullptr, {SymFactor::ham(V, 2)}});
        ComplexField got = apply_symmetry(op, phi1, 0.5);
        ComplexField want = cplx(4.0, 0.5) * phi1; // H^2 -> 4, i t -> 0.5 i
        CHECK(rel_interior(got, want, got.unreliable_band) < 1e-6);
    }

    SUBCASE("order budget is enforced") {
        ChargeSpec d1 = first_order_charge([](double, double) { return cplx(1.0, 0.0); },
                                           [](double, double) { return cplx(0.0, 0.0); },
                                           [](double, double) { return cplx(0.0, 0.0); });
        SymmetryOpSpec op;
        op.terms.push_back(SymTerm{
            nullptr,
            {SymFactor::charge(d1), SymFactor::charge(d1), SymFactor::charge(d1)}});
        CHECK_THROWS_WITH_AS(apply_symmetry(op, phi1, 0.0),
                             doctest::Contains("excessive-order"), LabError);

        SymmetryOpSpec op2;
        op2.terms.push_back(SymTerm{nullptr, {SymFactor::ham(V, 1), SymFactor::ham(V, 2)}});
        CHECK_THROWS_WITH_AS(apply_symmetry(op2, phi1, 0.0),
                             doctest::Contains("excessive-order"), LabError);
    }
}

TEST_CASE("canonical reduction of a stretched charge") {
    SUBCASE("identity background changes nothing") {
        Profile g = Profile::constant(1.0);
        Profile g1 = Profile::zero();
        CBivar F = [](double x, double) { return cplx(x, 0.0); };
        CBivar B = [](double x, double) { return cplx(x * x, 0.5); };
        const Grid1D probe = make_grid(-5.0, 5.0, 101);
        CanonicalForm cf = canonicalize_second_order(g, g1, F, B, probe, {0.0, 1.0});

        CHECK(cf.tau_of_t(0.7) == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(cf.y_of_xt(1.3, 0.7) == doctest::Approx(1.3).epsilon(1e-12));
        CHECK(std::abs(cf.multiplier(1.3, 0.7) - cplx(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(cf.charge_yt.f(1.3, 0.7) - cplx(1.3, 0.0)) < 1e-9);
        CHECK(std::abs(cf.charge_yt.w(1.3, 0.7) - cplx(1.3 * 1.3, 0.5)) < 1e-9);
        CHECK(cf.potential_shift(1.3, 0.7) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(cf.charge_yt.canonical);
    }

    SUBCASE("cosine-squared background stretches time to tan") {
        Profile rho = Profile::trig(1.0, 2.0, 0.0);
        Profile g = Profile::product(rho, rho); // cos^2(2t)
        Profile g1 = Profile::zero();
        // Im F is pinned to gdot x/4 by the structure
        CBivar F = [](double x, double t) {
            const double gdot = -2.0 * std::sin(4.0 * t);
            return cplx(0.0, 0.25 * gdot * x);
        };
        CBivar B = [](double, double) { return cplx(0.0, 0.0); };
        const Grid1D probe = make_grid(-5.0, 5.0, 101);
        CanonicalForm cf = canonicalize_second_order(g, g1, F, B, probe, {0.0, 0.3});

        const double t = 0.2;
        CHECK(cf.tau_of_t(t) == doctest::Approx(0.5 * std::tan(0.4)).epsilon(1e-9));
        CHECK(cf.y_of_xt(1.0, t) == doctest::Approx(1.0 / std::cos(0.4)).epsilon(1e-10));
        CHECK(std::abs(cf.multiplier(1.0, t)) ==
              doctest::Approx(1.0 / std::sqrt(std::cos(0.4))).epsilon(1e-10));
        // round trips
        CHECK(cf.t_of_tau(cf.tau_of_t(t)) == doctest::Approx(t).epsilon(1e-9));
        CHECK(cf.x_of_yt(cf.y_of_xt(0.8, t), cf.tau_of_t(t)) ==
              doctest::Approx(0.8).epsilon(1e-9));
    }

    SUBCASE("violated imaginary-part structure is rejected") {
        Profile rho = Profile::trig(1.0, 2.0, 0.0);
        Profile g = Profile::product(rho, rho);
        CBivar F = [](double, double) { return cplx(0.0, 0.0); }; // Im F should be gdot x/4
        CBivar B = [](double, double) { return cplx(0.0, 0.0); };
        const Grid1D probe = make_grid(-5.0, 5.0, 101);
        CHECK_THROWS_WITH_AS(
            canonicalize_second_order(g, Profile::zero(), F, B, probe, {0.05, 0.3}),
            doctest::Contains("imF-constraint-violated"), LabError);
    }

    SUBCASE("sign change of the stretch factor is rejected") {
        Profile g = Profile::trig(1.0, 2.0, 0.0); // cos 2t turns negative inside the window
        CBivar F = [](double x, double t) {
            return cplx(0.0, -0.5 * std::sin(2.0 * t) * x);
        };
        CBivar B = [](double, double) { return cplx(0.0, 0.0); };
        const Grid1D probe = make_grid(-5.0, 5.0, 101);
        CHECK_THROWS_WITH_AS(
            canonicalize_second_order(g, Profile::zero(), F, B, probe, {0.0, 1.0}),
            doctest::Contains("nonpositive-g"), LabError);
    }
}
