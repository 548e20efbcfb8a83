#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "intertwine/propagate.hpp"
#include "intertwine/quadrature.hpp"

using namespace itw;

namespace {

// spreading Gaussian packet of the free equation, sigma0 = 1
cplx free_gaussian(double x, double t) {
    const cplx s(1.0, 2.0 * t);
    return std::pow(M_PI, -0.25) / std::sqrt(s) * std::exp(-x * x / (2.0 * s));
}

double rel_l2(const ComplexField& got, const ComplexField& want, int band) {
    ComplexField d = got - want;
    return l2_norm_interior(d, band) / l2_norm_interior(want, band);
}

} // namespace

TEST_CASE("free packet follows the closed-form spread") {
    const Grid1D g = make_grid(-20.0, 20.0, 801); // h = 0.05
    ComplexField psi0 = sample_field(g, [](double x) { return free_gaussian(x, 0.0); });
    const TimeGrid tg = make_time_grid(0.0, 1e-3, 500);

    Snapshots s = propagate(const_bivar(0.0), psi0, tg);
    REQUIRE(s.fields.size() == 501);
    CHECK(s.max_norm_drift < 1e-12);
    CHECK_FALSE(s.boundary_leak);

    ComplexField want = sample_field(g, [&](double x) { return free_gaussian(x, 0.5); });
    CHECK(rel_l2(s.fields.back(), want, 4) < 1e-6);

    SUBCASE("thinned storage keeps the same trajectory") {
        PropagateOptions opt;
        opt.store_every = 50;
        Snapshots thin = propagate(const_bivar(0.0), psi0, tg, opt);
        REQUIRE(thin.fields.size() == 11);
        CHECK(thin.tg.dt == doctest::Approx(0.05));
        ComplexField d = thin.fields.back() - s.fields.back();
        CHECK(max_abs(d) < 1e-14);

        PropagateOptions bad;
        bad.store_every = 3; // 500 steps do not divide evenly
        CHECK_THROWS_WITH_AS(propagate(const_bivar(0.0), psi0, tg, bad),
                             doctest::Contains("grid-mismatch"), LabError);
    }
}

TEST_CASE("stationary oscillator state only turns its phase") {
    const Grid1D g = make_grid(-10.0, 10.0, 601);
    ComplexField phi0 = sample_field(g, [](double x) {
        return std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    });
    const Bivar V = [](double x, double) { return x * x - 1.0; };
    const TimeGrid tg = make_time_grid(0.0, 1e-3, 1000);

    Snapshots s = propagate(V, phi0, tg);
    CHECK(s.max_norm_drift < 1e-12);
    // E = 0 in these units: the state should not move at all
    CHECK(rel_l2(s.fields.back(), phi0, 4) < 1e-5);
    CHECK(schrodinger_residual(V, s).max_l2 < 1e-4);
}

TEST_CASE("diffusion settles onto the conjugated equilibrium") {
    const Grid1D g = make_grid(-8.0, 8.0, 801);
    // psi = e^{-x^2/2} is the zero mode of V = x^2 - 1 under the heat flow
    ComplexField psi0 = sample_field(g, [](double x) { return std::exp(-0.5 * x * x); });
    const Bivar V = [](double x, double) { return x * x - 1.0; };
    PropagateOptions opt;
    opt.kind = EvolutionKind::diffusion;

    Snapshots s = propagate(V, psi0, make_time_grid(0.0, 1e-3, 1000), opt);
    CHECK(s.kind == EvolutionKind::diffusion);
    CHECK(rel_l2(s.fields.back(), psi0, 4) < 1e-6);
    CHECK(diffusion_residual(V, s).max_l2 < 1e-5);
}

TEST_CASE("guards: step size, walls") {
    const Grid1D g = make_grid(-10.0, 10.0, 201);
    ComplexField psi0 = sample_field(g, [](double x) { return std::exp(-0.5 * x * x); });

    SUBCASE("potential too stiff for the step") {
        const Bivar V = [](double x, double) { return 1e4 * x * x; };
        CHECK_THROWS_WITH_AS(propagate(V, psi0, make_time_grid(0.0, 1e-3, 10)),
                             doctest::Contains("unstable-potential"), LabError);
    }

    SUBCASE("packet reaching the wall raises the leak flag") {
        // boosted packet on a short box runs into the right wall
        const Grid1D box = make_grid(-6.0, 6.0, 241);
        ComplexField moving = sample_field(box, [](double x) {
            return std::exp(cplx(-0.5 * x * x, 4.0 * x));
        });
        Snapshots s = propagate(const_bivar(0.0), moving, make_time_grid(0.0, 1e-3, 800));
        CHECK(s.boundary_leak);
        CHECK(s.leak_step > 0);
    }
}

TEST_CASE("separable sources solve their own equation") {
    const Grid1D ygrid = make_grid(-10.0, 10.0, 2001);
    const Grid1D xgrid = make_grid(-12.0, 12.0, 1201);

    SUBCASE("shrinking-frame oscillator mode") {
        SeparatedSpec spec;
        spec.rho = Profile::exponential(1.0, 1.0);
        spec.mu = Profile::zero();
        spec.gamma = Profile::zero();
        spec.modes = oscillator_eigenpairs(ygrid, 2, 3);
        spec.level = 1;

        const Bivar V2 = [](double x, double t) {
            const double y = x * std::exp(-t);
            return (y * y - 1.0) * std::exp(-2.0 * t) - 0.25 * x * x;
        };
        Snapshots s = separated_solution(spec, xgrid, make_time_grid(0.2, 5e-4, 8));
        CHECK(schrodinger_residual(V2, s).max_l2 < 1e-5);
    }

    SUBCASE("box modes from the grid eigensolver") {
        const Grid1D box = make_grid(0.0, M_PI, 2001);
        EigenResult box_modes = stationary_eigensolve([](double) { return 0.0; }, box, 2);
        CHECK(box_modes.energies[0] == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(box_modes.energies[1] == doctest::Approx(4.0).epsilon(1e-3));

        SeparatedSpec spec;
        spec.rho = Profile::constant(1.0);
        spec.mu = Profile::zero();
        spec.gamma = Profile::zero();
        spec.modes = box_modes;
        spec.level = 1;
        Snapshots s = separated_solution(spec, box, make_time_grid(0.0, 5e-4, 8));
        // static frame: the mode just rotates at its grid eigenvalue
        CHECK(schrodinger_residual(const_bivar(0.0), s).max_l2 < 5e-4);
    }
}

TEST_CASE("frame changes round-trip") {
    RMap map;
    map.rho = Profile::exponential(1.0, 1.0);
    map.mu = Profile::zero();
    map.gamma = Profile::zero();

    const Grid1D xgrid = make_grid(-12.0, 12.0, 1201);
    const Grid1D ygrid = make_grid(-8.0, 8.0, 801);

    // a generic smooth packet, sampled at two times
    const CBivar packet = [](double x, double t) {
        return std::exp(cplx(-0.3 * x * x, 0.7 * x + 0.2 * t));
    };
    Snapshots psi = sample_snapshots(xgrid, make_time_grid(0.1, 0.05, 2), packet);

    Snapshots phi = r_separation_forward(map, psi, ygrid);
    REQUIRE(phi.fields.size() == psi.fields.size());

    // the weight is a pure phase times sqrt(rho): moduli match on the overlap
    for (size_t k = 0; k < phi.fields.size(); ++k) {
        const double t = phi.tg.time(static_cast<int>(k));
        const double rho = std::exp(t);
        for (int i = 0; i < ygrid.n; i += 37) {
            const double y = ygrid.point(i);
            const double x = rho * y;
            if (x < xgrid.x_min || x > xgrid.x_max) continue;
            CHECK(std::abs(phi.fields[k].values[i]) ==
                  doctest::Approx(std::sqrt(rho) * std::abs(packet(x, t))).epsilon(1e-6));
        }
    }

    Snapshots back = r_separation_inverse(map, phi, xgrid);
    for (size_t k = 0; k < back.fields.size(); ++k) {
        const double t = back.tg.time(static_cast<int>(k));
        const double rho = std::exp(t);
        for (int i = 0; i < xgrid.n; i += 41) {
            const double x = xgrid.point(i);
            if (x / rho < ygrid.x_min || x / rho > ygrid.x_max) continue;
            CHECK(std::abs(back.fields[k].values[i] - packet(x, t)) < 1e-6);
        }
    }
}

TEST_CASE("drift-form substitution") {
    const Grid1D g = make_grid(-6.0, 6.0, 601);
    const Bivar U = [](double x, double) { return x * x; };

    // equilibrium density P = e^{-x^2}
    Snapshots P = sample_snapshots(g, make_time_grid(0.0, 0.01, 2),
                                   [](double x, double) { return std::exp(-x * x); },
                                   EvolutionKind::diffusion);

    Snapshots psi = fp_transform(P, U, "fp-to-diffusion");
    for (int i = 0; i < g.n; i += 29) {
        const double x = g.point(i);
        CHECK(std::abs(psi.fields[0].values[i] - std::exp(-0.5 * x * x)) < 1e-14);
    }

    Snapshots back = fp_transform(psi, U, "diffusion-to-fp");
    for (int i = 0; i < g.n; i += 29) {
        ComplexField d = back.fields[1] - P.fields[1];
        CHECK(max_abs(d) < 1e-14);
    }

    SUBCASE("densities must be real") {
        Snapshots bad = sample_snapshots(g, make_time_grid(0.0, 0.01, 1),
                                         [](double x, double) {
                                             return cplx(std::exp(-x * x), 0.1);
                                         },
                                         EvolutionKind::diffusion);
        CHECK_THROWS_WITH_AS(fp_transform(bad, U, "fp-to-diffusion"),
                             doctest::Contains("complex-input-for-fp"), LabError);
    }

    SUBCASE("direction string is checked") {
        CHECK_THROWS_WITH_AS(fp_transform(P, U, "sideways"), doctest::Contains("invalid-kind"),
                             LabError);
    }
}
