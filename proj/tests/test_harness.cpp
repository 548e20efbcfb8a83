#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "intertwine/quadrature.hpp"
#include "intertwine/verify.hpp"

using namespace itw;

namespace {

const double SQRT2 = std::sqrt(2.0);

// normalized oscillator states for V = x^2 - 1 (energies 0 and 2)
cplx phi0(double x) { return std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x); }
cplx phi1(double x) { return SQRT2 * std::pow(M_PI, -0.25) * x * std::exp(-0.5 * x * x); }

FirstOrderFamily harmonic_family() {
    return {Profile::constant(1.0), Profile::zero(), Profile::zero(),
            Profile::polynomial({0.0, 0.0, 0.5})};
}

ComplexField normalized_gaussian(const Grid1D& g, double center, double width, double kick) {
    ComplexField f = sample_field(g, [&](double x) {
        const double u = (x - center) / width;
        return std::exp(cplx(-0.5 * u * u, kick * x));
    });
    const double n = l2_norm(f);
    for (auto& v : f.values) v /= n;
    return f;
}

const ResidualEntry& find_entry(const VerificationReport& rep, const std::string& name) {
    for (const auto& e : rep.residuals)
        if (e.name == name) return e;
    FAIL("missing entry ", name);
    static ResidualEntry dummy;
    return dummy;
}

} // namespace

TEST_CASE("transport check on the oscillator ladder") {
    PotentialPair pair = first_order_pair(harmonic_family());
    const Grid1D g = make_grid(-10.0, 10.0, 2001);
    const TimeGrid tg = make_time_grid(0.0, 2e-4, 6);

    SUBCASE("excited source maps to a measured solution, both directions") {
        Snapshots src = sample_snapshots(g, tg, [](double x, double t) {
            return phi1(x) * std::exp(cplx(0.0, -2.0 * t));
        });
        // V1 = x^2 + 1 has the Gaussian itself as its lowest state, at the
        // same phase rate; its reverse image lands back on phi1
        Snapshots adj = sample_snapshots(g, tg, [](double x, double t) {
            return phi0(x) * std::exp(cplx(0.0, -2.0 * t));
        });
        VerificationReport rep = check_intertwining(pair, src, 1e-5, &adj);
        CHECK(rep.passed());
        CHECK_FALSE(rep.kernel_element);
        CHECK(find_entry(rep, "mapped-residual").value < 1e-5);
        CHECK(find_entry(rep, "adjoint-mapped-residual").value < 1e-5);
    }

    SUBCASE("ground source is flagged as a kernel element") {
        Snapshots src = sample_snapshots(g, tg, [](double x, double) { return phi0(x); });
        VerificationReport rep = check_intertwining(pair, src, 1e-5);
        CHECK(rep.passed());
        CHECK(rep.kernel_element);
    }

    SUBCASE("a non-solution source is refused up front") {
        Snapshots src = sample_snapshots(g, tg, [](double x, double) {
            return std::exp(-std::abs(x)) * std::sin(3.0 * x);
        });
        CHECK_THROWS_WITH_AS(check_intertwining(pair, src, 1e-5),
                             doctest::Contains("source-not-a-solution"), LabError);
    }
}

TEST_CASE("plane wave crosses the balanced hyperbolic partner without reflection") {
    NonStatFamily fam;
    fam.f1 = Profile::cosh_p(1.0 / SQRT2, 1.0);
    fam.sigma = 0.5;
    fam.delta = 0.5;
    fam.lambda0 = 1.0;
    const Grid1D probe = make_grid(-6.0, 6.0, 601);
    NonStatOps ops = nonstat_stationary_pair(fam, probe);

    const double k = 2.0;
    const Grid1D g = make_grid(-25.0, 25.0, 5001);
    const TimeGrid tg = make_time_grid(0.0, 2e-4, 6);
    Snapshots src = sample_snapshots(g, tg, [k](double x, double t) {
        return std::exp(cplx(0.0, k * x - k * k * t));
    });

    VerificationReport rep = check_intertwining(ops.pair, src, 1e-4);
    CHECK(rep.passed());

    // far field of the mapped wave: single traveling component with the
    // amplitude |(ik)^2 - 2 f_inf (ik) + b_inf| = |-k^2 + 1/2 - ik|
    Snapshots mapped = apply_charge_series(ops.pair.charge, src);
    const ComplexField& tail = mapped.fields[3];
    VerificationReport refl = reflection_check(tail, k, 12.0, 24.0);
    CHECK(refl.passed());
    CHECK(find_entry(refl, "counter-ratio").value < 1e-3);

    const double want = std::abs(cplx(-k * k + 0.5, -k));
    const double window = M_PI / k * 7.0;
    CHECK(find_entry(refl, "forward-amplitude").value ==
          doctest::Approx(want * window).epsilon(1e-3));
}

TEST_CASE("reflection protocol resolves small counter components") {
    const Grid1D g = make_grid(0.0, 30.0, 3001);
    const double k = 2.0;

    SUBCASE("pure forward wave") {
        ComplexField f = sample_field(g, [k](double x) { return std::exp(cplx(0.0, k * x)); });
        VerificationReport rep = reflection_check(f, k, 5.0, 25.0);
        CHECK(find_entry(rep, "counter-ratio").value < 1e-6);
    }

    SUBCASE("seeded counter amplitude is measured faithfully") {
        ComplexField f = sample_field(g, [k](double x) {
            return std::exp(cplx(0.0, k * x)) + 5e-4 * std::exp(cplx(0.0, -k * x));
        });
        VerificationReport rep = reflection_check(f, k, 5.0, 25.0);
        const double r = find_entry(rep, "counter-ratio").value;
        CHECK(r == doctest::Approx(5e-4).epsilon(0.02));
    }

    SUBCASE("window shorter than a half period is refused") {
        ComplexField f = sample_field(g, [k](double x) { return std::exp(cplx(0.0, k * x)); });
        CHECK_THROWS_WITH_AS(reflection_check(f, k, 5.0, 6.0),
                             doctest::Contains("window-violation"), LabError);
    }
}

TEST_CASE("symmetry commutators") {
    const TimeGrid tg = make_time_grid(0.0, 2e-5, 6);

    SUBCASE("stationary potential commutes with its own Hamiltonian") {
        const Bivar V = [](double x, double) { return std::cos(x); };
        SymmetryOpSpec R;
        SymTerm term;
        term.coeff = [](double) { return cplx(1.0, 0.0); };
        term.factors = {SymFactor::ham(V, 1)};
        R.terms.push_back(term);

        const Grid1D g = make_grid(-16.0, 16.0, 1601);
        std::vector<ComplexField> tests = {normalized_gaussian(g, 0.0, 1.0, 0.3),
                                           normalized_gaussian(g, 1.0, 1.5, -0.5)};
        VerificationReport rep = check_symmetry(V, R, tests, tg, 1e-6);
        CHECK(rep.passed());
    }

    SUBCASE("traveling-profile charge commutes with its evolution") {
        const double v = 0.8;
        SymmetryFamily fam{Profile::constant(1.0), Profile::constant(2.0 * v),
                           Profile::trig(1.0, 1.0, 0.0)};
        SymmetryFamilyOps ops = symmetry_family_build(fam);
        const Grid1D g = make_grid(-16.0, 16.0, 1601);
        std::vector<ComplexField> tests = {normalized_gaussian(g, -1.0, 1.2, 0.4)};
        VerificationReport rep = check_symmetry(ops.V, symmetry_single(ops.R), tests, tg, 1e-5);
        CHECK(rep.passed());
    }

    SUBCASE("charge products are symmetries of their own side") {
        PotentialPair pair = first_order_pair(harmonic_family());
        ChargeSpec qm = adjoint_charge(pair.charge);
        const Grid1D g = make_grid(-14.0, 14.0, 1401);
        std::vector<ComplexField> tests = {normalized_gaussian(g, 0.5, 1.0, 0.2)};

        VerificationReport r1 =
            check_symmetry(pair.V1, symmetry_product(pair.charge, qm), tests, tg, 1e-5);
        CHECK(r1.passed());
        VerificationReport r2 =
            check_symmetry(pair.V2, symmetry_product(qm, pair.charge), tests, tg, 1e-5);
        CHECK(r2.passed());
    }

    SUBCASE("composition order discriminates the oscillating family") {
        PainleveIVFamily fam;
        fam.f = ShapeFn(Profile::power(0.5, -1.0));
        fam.m = 1.0;
        fam.a = -1.0;
        fam.d = -1.0;
        const Grid1D probe = make_grid(0.8, 12.8, 501);
        PainleveIVOps ops = painleve4_pair(fam, probe);

        // the commutator defect scales with dt^2 <H>^3, so the packet sits at
        // moderate energy and the step is small
        const Grid1D g = make_grid(0.8, 12.8, 1201);
        std::vector<ComplexField> tests = {normalized_gaussian(g, 5.0, 0.6, 0.0)};
        const TimeGrid tgf = make_time_grid(0.0, 5e-6, 6);

        VerificationReport good = check_symmetry(ops.pair.V2, ops.R2, tests, tgf, 1e-5);
        CHECK(good.passed());
        VerificationReport bad =
            check_symmetry(ops.pair.V2, ops.R2_misordered, tests, tgf, 1e-5);
        CHECK_FALSE(bad.passed());
        CHECK(find_entry(bad, "commutator-1").value > 1e-2);
    }

    SUBCASE("boundary-touching tests are refused") {
        const Grid1D g = make_grid(-4.0, 4.0, 401);
        ComplexField wide = sample_field(g, [](double x) { return std::exp(cplx(0.0, x)); });
        const Bivar V = [](double, double) { return 0.0; };
        SymmetryOpSpec R;
        SymTerm term;
        term.coeff = [](double) { return cplx(1.0, 0.0); };
        term.factors = {SymFactor::ham(V, 1)};
        R.terms.push_back(term);
        CHECK_THROWS_WITH_AS(check_symmetry(V, R, {wide}, tg, 1e-6),
                             doctest::Contains("test-touches-boundary"), LabError);
    }
}

TEST_CASE("norm identity of the stationary-partner charge") {
    NonStatFamily fam;
    fam.f1 = Profile::cosh_p(1.0 / SQRT2, 1.0);
    fam.sigma = 0.5;
    fam.delta = 0.5;
    fam.lambda0 = 1.0;
    const Grid1D probe = make_grid(-6.0, 6.0, 601);
    NonStatOps ops = nonstat_stationary_pair(fam, probe);

    const Grid1D g = make_grid(-16.0, 16.0, 3201);

    SUBCASE("holds on generic normalized packets") {
        VerificationReport rep =
            check_norm_identity(ops.pair, normalized_gaussian(g, 0.7, 1.3, 0.6), 1.0, 1e-5, 0.2);
        CHECK(rep.passed());
        CHECK(find_entry(rep, "norm-identity").value < 1e-5);
    }

    SUBCASE("zero field passes trivially") {
        ComplexField zero(g);
        VerificationReport rep = check_norm_identity(ops.pair, zero, 1.0, 1e-5);
        CHECK(rep.passed());
    }

    SUBCASE("unnormalized input is rejected") {
        ComplexField f = normalized_gaussian(g, 0.0, 1.0, 0.0);
        for (auto& v : f.values) v *= 1.7;
        CHECK_THROWS_WITH_AS(check_norm_identity(ops.pair, f, 1.0, 1e-5),
                             doctest::Contains("unnormalized-input"), LabError);
    }
}

TEST_CASE("zero-mode certification and normalizability") {
    SUBCASE("Gaussian shape: normalizable, sqrt(pi)") {
        const Grid1D g = make_grid(-10.0, 10.0, 2001);
        VerificationReport rep = zero_mode_check(harmonic_family(), g, 0.0);
        CHECK(rep.passed());
        CHECK(rep.kernel_element);
        CHECK(find_entry(rep, "annihilation").value < 1e-8);
        CHECK(find_entry(rep, "weight-integral").value ==
              doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));
    }

    SUBCASE("quartic shape: normalizable, frozen quadrature value") {
        FirstOrderFamily fam{Profile::constant(1.0), Profile::zero(), Profile::zero(),
                             Profile::polynomial({0.0, 0.0, 0.0, 0.0, 0.25})};
        const Grid1D g = make_grid(-6.0, 6.0, 2401);
        VerificationReport rep = zero_mode_check(fam, g, 0.0);
        CHECK(rep.passed());
        CHECK(find_entry(rep, "annihilation").value < 1e-8);
        CHECK(find_entry(rep, "weight-integral").value ==
              doctest::Approx(2.15580054954092794).epsilon(1e-8));
    }

    SUBCASE("cubic shape: divergent on the left") {
        FirstOrderFamily fam{Profile::constant(1.0), Profile::zero(), Profile::zero(),
                             Profile::polynomial({0.0, 0.0, 0.0, 1.0 / 3.0})};
        const Grid1D g = make_grid(-6.0, 6.0, 1201);
        VerificationReport rep = zero_mode_check(fam, g, 0.0);
        const auto& w = find_entry(rep, "weight-integral");
        CHECK(std::isinf(w.value));
        CHECK(w.note.find("not-normalizable") != std::string::npos);
    }

    SUBCASE("flat shape: constant weight never decays") {
        FirstOrderFamily fam{Profile::constant(1.0), Profile::zero(), Profile::zero(),
                             Profile::zero()};
        const Grid1D g = make_grid(-6.0, 6.0, 1201);
        VerificationReport rep = zero_mode_check(fam, g, 0.0);
        CHECK(std::isinf(find_entry(rep, "weight-integral").value));
    }
}

TEST_CASE("convergence studies") {
    SUBCASE("spatial stencil order on an analytic wave") {
        LevelMeasure measure = [](const Grid1D& g, const TimeGrid& tg) {
            Snapshots s = sample_snapshots(g, tg, [](double x, double t) {
                return std::exp(cplx(0.0, x - t));
            });
            return schrodinger_residual(const_bivar(0.0), s).max_l2;
        };
        const TimeGrid tg = make_time_grid(0.0, 5e-5, 4);
        std::vector<std::pair<Grid1D, TimeGrid>> levels = {
            {make_grid(-20.0, 20.0, 401), tg},
            {make_grid(-20.0, 20.0, 801), tg},
            {make_grid(-20.0, 20.0, 1601), tg},
        };
        VerificationReport rep = convergence_study(measure, levels, 4.0);
        CHECK(rep.passed());
        for (const auto& c : rep.convergence) CHECK(c.observed_order > 3.5);
    }

    SUBCASE("time-step order of the propagator") {
        LevelMeasure measure = [](const Grid1D& g, const TimeGrid& tg) {
            ComplexField psi0 = sample_field(g, [](double x) {
                const cplx s(1.0, 0.0);
                return std::pow(M_PI, -0.25) / std::sqrt(s) * std::exp(-x * x / (2.0 * s));
            });
            Snapshots s = propagate(const_bivar(0.0), psi0, tg);
            ComplexField want = sample_field(g, [&](double x) {
                const cplx sp(1.0, 2.0 * tg.time(tg.steps));
                return std::pow(M_PI, -0.25) / std::sqrt(sp) * std::exp(-x * x / (2.0 * sp));
            });
            ComplexField d = s.fields.back() - want;
            return l2_norm_interior(d, 4);
        };
        const Grid1D g = make_grid(-20.0, 20.0, 4001);
        std::vector<std::pair<Grid1D, TimeGrid>> levels = {
            {g, make_time_grid(0.0, 4e-3, 125)},
            {g, make_time_grid(0.0, 2e-3, 250)},
            {g, make_time_grid(0.0, 1e-3, 500)},
        };
        VerificationReport rep = convergence_study(measure, levels, 2.0);
        CHECK(rep.passed());
        for (const auto& c : rep.convergence) {
            CHECK(c.observed_order > 1.7);
            CHECK(c.observed_order < 2.3);
        }
    }

    SUBCASE("identical levels are not a refinement") {
        LevelMeasure measure = [](const Grid1D&, const TimeGrid&) { return 1.0; };
        const Grid1D g = make_grid(-1.0, 1.0, 101);
        const TimeGrid tg = make_time_grid(0.0, 1e-3, 10);
        std::vector<std::pair<Grid1D, TimeGrid>> levels = {{g, tg}, {g, tg}};
        CHECK_THROWS_WITH_AS(convergence_study(measure, levels, 2.0),
                             doctest::Contains("non-nested-grids"), LabError);
    }
}
