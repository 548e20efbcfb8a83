#include "intertwine/families.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "intertwine/quadrature.hpp"

namespace itw {

namespace {

double positive_scale(const Profile& p, double t, const char* what) {
    const double v = p(t);
    require(v > 0.0, "nonpositive-rho", std::string(what) + " must stay positive");
    return v;
}

template <typename Fn>
double max_abs_on(const Grid1D& probe, Fn&& fn) {
    double m = 0.0;
    for (int i = 0; i < probe.n; ++i) m = std::max(m, std::abs(fn(probe.point(i))));
    return m;
}

std::string describe_or(const Profile& p, const char* fallback) {
    return p.valid() ? p.describe() : std::string(fallback);
}

} // namespace

// ---------------------------------------------------------------------------

PotentialPair first_order_pair(const FirstOrderFamily& fam) {
    require(fam.rho.valid() && fam.mu.valid() && fam.gamma.valid() && fam.K.valid(),
            "invalid-kind", "first-order family needs rho, mu, gamma and K");
    const Profile rho = fam.rho, mu = fam.mu, gamma = fam.gamma, K = fam.K;

    auto V = [rho, mu, gamma, K](double x, double t, double sign) {
        const auto r = rho.jet(t);
        require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
        const auto m = mu.jet(t);
        const double y = x / r.v + m.v;
        const auto k = K.jet(y);
        const double shape = (k.d1 * k.d1 + sign * k.d2) / (r.v * r.v);
        return shape - (r.d2 / (4.0 * r.v)) * x * x + (r.d1 * m.d1 + 0.5 * r.v * m.d2) * x -
               0.25 * r.v * r.v * m.d1 * m.d1 + gamma.d(1, t);
    };

    PotentialPair out;
    out.V1 = [V](double x, double t) { return V(x, t, +1.0); };
    out.V2 = [V](double x, double t) { return V(x, t, -1.0); };
    out.charge = first_order_charge(
        [rho](double, double t) { return cplx(positive_scale(rho, t, "scale profile"), 0.0); },
        [rho, mu, K](double x, double t) {
            const auto r = rho.jet(t);
            require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
            const auto m = mu.jet(t);
            const double y = x / r.v + m.v;
            return cplx(K.d(1, y), -0.5 * (r.d1 * x - r.v * r.v * m.d1));
        },
        [](double, double) { return cplx(0.0, 0.0); }, "first-order intertwiner");

    std::ostringstream prov;
    prov << "first-order pair: rho=" << rho.describe() << ", mu=" << mu.describe()
         << ", gamma=" << gamma.describe() << ", K=" << K.describe()
         << "; gauge: additive phase folded into gamma";
    out.provenance = prov.str();
    return out;
}

Bivar first_order_gauge_phase(const FirstOrderFamily& fam) {
    const Profile rho = fam.rho, mu = fam.mu, gamma = fam.gamma;
    return [rho, mu, gamma](double x, double t) {
        const auto r = rho.jet(t);
        require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
        return -(r.d1 / (4.0 * r.v)) * x * x + 0.5 * r.v * mu.d(1, t) * x + gamma(t);
    };
}

CBivar first_order_zero_mode(const FirstOrderFamily& fam) {
    const Profile rho = fam.rho, mu = fam.mu, K = fam.K;
    const Bivar g = first_order_gauge_phase(fam);
    return [rho, mu, K, g](double x, double t) {
        const double r = positive_scale(rho, t, "scale profile");
        const double y = x / r + mu(t);
        return std::exp(cplx(-K(y), -g(x, t))) / std::sqrt(r);
    };
}

std::function<double(double)> first_order_weight(const FirstOrderFamily& fam) {
    const Profile K = fam.K;
    return [K](double y) { return std::exp(-2.0 * K(y)); };
}

// ---------------------------------------------------------------------------

SymmetryFamilyOps symmetry_family_build(const SymmetryFamily& fam) {
    require(fam.omega.valid() && fam.nu.valid() && fam.Phi.valid(), "invalid-kind",
            "symmetry family needs omega, nu and Phi");
    const Profile w = fam.omega, nu = fam.nu, Phi = fam.Phi;

    auto drift = std::make_shared<CumulativeIntegral>(
        [w, nu](double t) {
            const double wv = w(t);
            require(wv > 0.0, "nonpositive-omega", "frequency profile must stay positive");
            return nu(t) / (wv * std::sqrt(wv));
        },
        0.0, 1e-3);

    SymmetryFamilyOps out;
    out.z_of = [w, drift](double x, double t) {
        const double wv = w(t);
        require(wv > 0.0, "nonpositive-omega", "frequency profile must stay positive");
        return x / std::sqrt(wv) - drift->to(t);
    };
    const auto z_of = out.z_of;

    out.V = [w, nu, Phi, z_of](double x, double t) {
        const auto wj = w.jet(t);
        require(wj.v > 0.0, "nonpositive-omega", "frequency profile must stay positive");
        const auto nj = nu.jet(t);
        const double quad = -(wj.d2 / wj.v - 0.5 * wj.d1 * wj.d1 / (wj.v * wj.v)) / 8.0;
        const double lin = -0.5 * (nj.d1 / wj.v - 0.5 * nj.v * wj.d1 / (wj.v * wj.v));
        return quad * x * x + lin * x + Phi(z_of(x, t)) / wj.v;
    };
    out.delta = [w, nu](double x, double t) { return 0.25 * w.d(1, t) * x + 0.5 * nu(t); };
    out.zeta = [w, nu, Phi, z_of](double x, double t) {
        const auto wj = w.jet(t);
        require(wj.v > 0.0, "nonpositive-omega", "frequency profile must stay positive");
        const double nv = nu(t);
        return Phi(z_of(x, t)) + wj.d1 * wj.d1 * x * x / (16.0 * wj.v) +
               nv * wj.d1 * x / (4.0 * wj.v) + nv * nv / (4.0 * wj.v);
    };

    const Bivar delta = out.delta, zeta = out.zeta;
    out.R = second_order_charge(
        [w](double t) {
            const double wv = w(t);
            require(wv > 0.0, "nonpositive-omega", "frequency profile must stay positive");
            return -wv;
        },
        [delta](double x, double t) { return cplx(0.0, -delta(x, t)); },
        [w](double, double t) { return cplx(0.0, -0.25 * w.d(1, t)); },
        [w, zeta](double x, double t) { return cplx(zeta(x, t), 0.25 * w.d(1, t)); }, false,
        "quadratic symmetry operator");
    out.R_op = symmetry_single(out.R, "quadratic symmetry operator");

    std::ostringstream prov;
    prov << "quadratic symmetry: omega=" << w.describe() << ", nu=" << nu.describe()
         << ", Phi=" << Phi.describe() << "; moving-frame origin fixed at t=0";
    out.provenance = prov.str();
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ChiJets {
    // chi, dchi/dx, d2chi/dx2, dchi/dt at (x, t)
    double v, x1, x2, t1;
};

ChiJets chi_eval(const Profile& X, const Profile& T, ChiCombine combine, double amp, double x,
                 double t) {
    const auto xj = X.jet(x);
    const auto tj = T.jet(t);
    ChiJets out{};
    if (combine == ChiCombine::add) {
        out.v = amp * (xj.v + tj.v);
        out.x1 = amp * xj.d1;
        out.x2 = amp * xj.d2;
        out.t1 = amp * tj.d1;
    } else {
        out.v = amp * xj.v * tj.v;
        out.x1 = amp * xj.d1 * tj.v;
        out.x2 = amp * xj.d2 * tj.v;
        out.t1 = amp * xj.v * tj.d1;
    }
    return out;
}

} // namespace

FokkerPlanckOps fokker_planck_pair(const FokkerPlanckFamily& fam) {
    require(fam.chi_x.valid() && fam.chi_t.valid() && fam.rho.valid(), "invalid-kind",
            "drift-form family needs chi_x, chi_t and rho");
    require(std::abs(fam.chi_amplitude.imag()) <=
                1e-15 * (1.0 + std::abs(fam.chi_amplitude.real())),
            "complex-chi-rejected", "superpotential amplitude must be real");
    const double amp = fam.chi_amplitude.real();
    const Profile X = fam.chi_x, T = fam.chi_t, rho = fam.rho;
    const ChiCombine comb = fam.combine;

    FokkerPlanckOps out;
    out.chi = [X, T, comb, amp](double x, double t) { return chi_eval(X, T, comb, amp, x, t).v; };
    out.pair.V1 = [X, T, comb, amp, rho](double x, double t) {
        const auto c = chi_eval(X, T, comb, amp, x, t);
        const auto r = rho.jet(t);
        require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
        return c.x1 * c.x1 + c.x2 + c.t1 - r.d1 / r.v;
    };
    out.pair.V2 = [X, T, comb, amp](double x, double t) {
        const auto c = chi_eval(X, T, comb, amp, x, t);
        return c.x1 * c.x1 - c.x2 + c.t1;
    };
    out.pair.charge = first_order_charge(
        [rho](double, double t) { return cplx(positive_scale(rho, t, "scale profile"), 0.0); },
        [X, T, comb, amp, rho](double x, double t) {
            return cplx(positive_scale(rho, t, "scale profile") *
                            chi_eval(X, T, comb, amp, x, t).x1,
                        0.0);
        },
        [](double, double) { return cplx(0.0, 0.0); }, "drift-form intertwiner");
    out.U1 = [X, T, comb, amp, rho](double x, double t) {
        return 2.0 * std::log(positive_scale(rho, t, "scale profile")) -
               2.0 * chi_eval(X, T, comb, amp, x, t).v;
    };
    out.U2 = [X, T, comb, amp](double x, double t) {
        return 2.0 * chi_eval(X, T, comb, amp, x, -t).v;
    };

    std::ostringstream prov;
    prov << "drift-form pair: chi_x=" << X.describe() << ", chi_t=" << T.describe()
         << (comb == ChiCombine::add ? " (added)" : " (multiplied)") << ", amplitude=" << amp
         << ", rho=" << rho.describe() << "; time reflection applied to the second drift";
    out.provenance = prov.str();
    out.pair.provenance = out.provenance;
    return out;
}

ChargeSpec fp_level_charge(const FokkerPlanckOps& ops) {
    const Bivar U1 = ops.U1, U2 = ops.U2, chi = ops.chi;
    const CBivar c1 = ops.pair.charge.c1, c0 = ops.pair.charge.c0;
    auto factor = [U1, U2](double x, double t) {
        return std::exp(0.5 * (U2(x, t) - U1(x, t)));
    };
    // d/dx U2 and U1 from the conjugation structure: U2' = 2 chi'(x,-t),
    // U1' = -2 chi'(x,t); both come from the stored charge coefficient
    // c0 = rho chi' and its time reflection.
    return first_order_charge(
        [c1, factor](double x, double t) { return c1(x, t) * factor(x, t); },
        [c0, c1, factor](double x, double t) {
            const cplx chix = c0(x, t) / c1(x, t); // chi'(x, t)
            const cplx chix_neg = c0(x, -t) / c1(x, -t);
            return c1(x, t) * factor(x, t) * (chix + chix_neg);
        },
        [c0, c1, factor](double x, double t) {
            const cplx chix = c0(x, t) / c1(x, t);
            const cplx chix_neg = c0(x, -t) / c1(x, -t);
            return c1(x, t) * factor(x, t) * (chix_neg + chix);
        },
        "drift-form level mapping");
}

// ---------------------------------------------------------------------------

PainleveIVOps painleve4_pair(const PainleveIVFamily& fam, const Grid1D& probe) {
    require(fam.f.valid(), "invalid-kind", "shape function is required");
    const ShapeFn f = fam.f;
    const double m = fam.m, a = fam.a, d = fam.d;

    const double fscale = std::max(1.0, max_abs_on(probe, [&](double x) { return f(x); }));
    if (m != 0.0) {
        const double dscale = max_abs_on(probe, [&](double x) { return f.d(1, x); });
        require(dscale > 1e-12 * fscale, "vanishing-f-derivative-structure",
                "constant shape cannot close the oscillating charge at nonzero frequency");
    }
    for (int i = 0; i < probe.n; ++i)
        require(std::abs(f(probe.point(i))) > 1e-10 * fscale, "vanishing-f",
                "shape vanishes on the probe grid; ratio-route coefficients blow up");

    const OdeResidual res = ode_residual(ResidualKind::painleve4, f, probe, {m, a, d});
    require(res.max_abs <= fam.residual_gate, "painleve-residual-too-large",
            "shape fails the structural equation (max residual " + std::to_string(res.max_abs) +
                ")");

    auto W = [f, m](double x) { return -2.0 * f(x) - m * x; };
    auto Wp = [f, m](double x) { return -2.0 * f.d(1, x) - m; };
    auto b_of = [f, d](double x) {
        const auto j = f.jet(x);
        require(std::abs(j[0]) > 1e-12, "vanishing-f", "shape vanishes at evaluation point");
        return -j[1] + j[0] * j[0] - j[2] / (2.0 * j[0]) +
               j[1] * j[1] / (4.0 * j[0] * j[0]) + d / (4.0 * j[0] * j[0]);
    };

    PainleveIVOps out;
    out.A = [m, m0 = fam.m0](double t) { return m0 * std::exp(cplx(0.0, -2.0 * m * t)); };
    const auto A = out.A;

    out.pair.V1 = [W, Wp](double x, double) {
        const double w = W(x);
        return w * w + Wp(x);
    };
    out.pair.V2 = [W, Wp, m](double x, double) {
        const double w = W(x);
        return w * w - Wp(x) - 2.0 * m;
    };
    auto ratio_route = [f, d, a](double x, double sign) {
        const auto j = f.jet(x);
        require(std::abs(j[0]) > 1e-12, "vanishing-f", "shape vanishes at evaluation point");
        return sign * 2.0 * j[1] + j[0] * j[0] + j[2] / (2.0 * j[0]) -
               j[1] * j[1] / (4.0 * j[0] * j[0]) - d / (4.0 * j[0] * j[0]) - a;
    };
    out.V1_alt = [ratio_route](double x, double) { return ratio_route(x, -1.0); };
    out.V2_alt = [ratio_route](double x, double) { return ratio_route(x, +1.0); };

    out.Mp = second_order_charge([](double) { return 1.0; },
                                 [f](double x, double) { return cplx(f(x), 0.0); },
                                 [f](double x, double) { return cplx(f.d(1, x), 0.0); },
                                 [b_of](double x, double) { return cplx(b_of(x), 0.0); }, false,
                                 "second-order piece");
    out.Mm = adjoint_charge(out.Mp);
    out.ap = first_order_charge([](double, double) { return cplx(1.0, 0.0); },
                                [W](double x, double) { return cplx(W(x), 0.0); },
                                [](double, double) { return cplx(0.0, 0.0); },
                                "first-order piece");
    out.am = first_order_charge([](double, double) { return cplx(-1.0, 0.0); },
                                [W](double x, double) { return cplx(W(x), 0.0); },
                                [](double, double) { return cplx(0.0, 0.0); },
                                "first-order piece, reversed");

    out.pair.charge = second_order_charge(
        [](double) { return 1.0; },
        [f, A](double x, double t) { return cplx(f(x), 0.0) - 0.5 * A(t); },
        [f](double x, double) { return cplx(f.d(1, x), 0.0); },
        [b_of, W, A](double x, double t) { return cplx(b_of(x), 0.0) + A(t) * W(x); }, false,
        "combined oscillating charge");
    out.pair.halfline = true;

    auto coeff_plus = [m](double t) { return std::exp(cplx(0.0, 2.0 * m * t)); };
    auto coeff_minus = [m](double t) { return std::exp(cplx(0.0, -2.0 * m * t)); };
    {
        SymTerm t1{coeff_plus, {SymFactor::charge(out.Mp), SymFactor::charge(out.am)}};
        SymTerm t2{coeff_minus, {SymFactor::charge(out.ap), SymFactor::charge(out.Mm)}};
        out.R1 = SymmetryOpSpec{{t1, t2}, "closed symmetry, upper partner"};
    }
    {
        SymTerm t1{coeff_plus, {SymFactor::charge(out.am), SymFactor::charge(out.Mp)}};
        SymTerm t2{coeff_minus, {SymFactor::charge(out.Mm), SymFactor::charge(out.ap)}};
        out.R2 = SymmetryOpSpec{{t1, t2}, "closed symmetry, lower partner"};
        SymTerm bad{coeff_minus, {SymFactor::charge(out.Mp), SymFactor::charge(out.am)}};
        out.R2_misordered = SymmetryOpSpec{{t1, bad}, "type-mismatched composition"};
    }

    std::ostringstream prov;
    prov << "oscillating third-order charge: shape=" << f.note() << ", m=" << m << ", a=" << a
         << ", d=" << d << ", amplitude=" << fam.m0.real();
    if (fam.m0.imag() != 0.0) prov << "+" << fam.m0.imag() << "i";
    prov << "; probe residual " << res.max_abs;
    out.provenance = prov.str();
    out.pair.provenance = out.provenance;
    return out;
}

// ---------------------------------------------------------------------------

PainleveIIOps painleve2_pair(const PainleveIIFamily& fam, const Grid1D& probe) {
    require(fam.W.valid(), "invalid-kind", "shape function is required");
    const ShapeFn W = fam.W;
    const double mt = fam.mtilde, n = fam.n;

    for (int i = 0; i < probe.n; ++i) {
        const double w = W(probe.point(i));
        require(std::isfinite(w) && std::abs(w) < 1e6, "singular-W-on-grid",
                "shape is singular on the probe grid");
    }
    const OdeResidual res = ode_residual(ResidualKind::painleve2, W, probe, {mt, fam.k});
    require(res.max_abs <= fam.residual_gate, "painleve-residual-too-large",
            "shape fails the structural equation (max residual " + std::to_string(res.max_abs) +
                ")");

    auto f_of = [W, n](double x) { return n - 0.5 * W(x); };
    auto b_of = [W, n, mt](double x) {
        const auto j = W.jet(x);
        return 0.5 * (j[1] - j[0] * j[0]) - 2.0 * n * j[0] - mt * x;
    };

    PainleveIIOps out;
    out.A = [mt](double t) { return cplx(0.0, -2.0 * mt * t); };
    const auto A = out.A;

    out.pair.V1 = [W](double x, double) {
        const auto j = W.jet(x);
        return j[0] * j[0] + j[1];
    };
    out.pair.V2 = [W](double x, double) {
        const auto j = W.jet(x);
        return j[0] * j[0] - j[1];
    };
    out.H1V = out.pair.V1;
    out.H2V = out.pair.V2;

    out.Mp = second_order_charge([](double) { return 1.0; },
                                 [f_of](double x, double) { return cplx(f_of(x), 0.0); },
                                 [W](double x, double) { return cplx(-0.5 * W.d(1, x), 0.0); },
                                 [b_of](double x, double) { return cplx(b_of(x), 0.0); }, false,
                                 "second-order piece");
    out.Mm = adjoint_charge(out.Mp);
    out.ap = first_order_charge([](double, double) { return cplx(1.0, 0.0); },
                                [W](double x, double) { return cplx(W(x), 0.0); },
                                [](double, double) { return cplx(0.0, 0.0); },
                                "first-order piece");
    out.am = first_order_charge([](double, double) { return cplx(-1.0, 0.0); },
                                [W](double x, double) { return cplx(W(x), 0.0); },
                                [](double, double) { return cplx(0.0, 0.0); },
                                "first-order piece, reversed");

    out.pair.charge = second_order_charge(
        [](double) { return 1.0; },
        [f_of, A](double x, double t) { return cplx(f_of(x), 0.0) - 0.5 * A(t); },
        [W](double x, double) { return cplx(-0.5 * W.d(1, x), 0.0); },
        [b_of, W, A](double x, double t) { return cplx(b_of(x), 0.0) + A(t) * W(x); }, false,
        "linear-in-time charge (constant part gauged off at t=0)");
    out.pair.halfline = true;

    const Bivar V1 = out.pair.V1, V2 = out.pair.V2;
    auto lin = [mt](double t) { return cplx(0.0, 2.0 * mt * t); };   // 2 i mt t
    auto lin_neg = [mt](double t) { return cplx(0.0, -2.0 * mt * t); };
    auto sq = [mt](double t) { return cplx(4.0 * mt * mt * t * t, 0.0); };
    {
        SymTerm p1{nullptr, {SymFactor::charge(out.Mp), SymFactor::charge(out.Mm)}};
        SymTerm p2{[](double) { return cplx(-1.0, 0.0); }, {SymFactor::ham(V1, 2)}};
        SymTerm p3{lin, {SymFactor::charge(out.Mp), SymFactor::charge(out.am)}};
        SymTerm p4{lin_neg, {SymFactor::charge(out.ap), SymFactor::charge(out.Mm)}};
        SymTerm p5{sq, {SymFactor::ham(V1, 1)}};
        out.R1 = SymmetryOpSpec{{p1, p2, p3, p4, p5}, "quartic symmetry, upper partner"};
    }
    {
        SymTerm p1{nullptr, {SymFactor::charge(out.Mm), SymFactor::charge(out.Mp)}};
        SymTerm p2{[](double) { return cplx(-1.0, 0.0); }, {SymFactor::ham(V2, 2)}};
        SymTerm p3{lin, {SymFactor::charge(out.am), SymFactor::charge(out.Mp)}};
        SymTerm p4{lin_neg, {SymFactor::charge(out.Mm), SymFactor::charge(out.ap)}};
        SymTerm p5{sq, {SymFactor::ham(V2, 1)}};
        out.R2 = SymmetryOpSpec{{p1, p2, p3, p4, p5}, "quartic symmetry, lower partner"};
    }
    auto iconst = [](double) { return cplx(0.0, 1.0); };
    auto iconst_neg = [](double) { return cplx(0.0, -1.0); };
    auto lin4 = [mt](double t) { return cplx(4.0 * mt * t, 0.0); };
    {
        SymTerm p1{iconst, {SymFactor::charge(out.Mp), SymFactor::charge(out.am)}};
        SymTerm p2{iconst_neg, {SymFactor::charge(out.ap), SymFactor::charge(out.Mm)}};
        SymTerm p3{lin4, {SymFactor::ham(V1, 1)}};
        out.Rt1 = SymmetryOpSpec{{p1, p2, p3}, "cubic symmetry, upper partner"};
    }
    {
        SymTerm p1{iconst, {SymFactor::charge(out.am), SymFactor::charge(out.Mp)}};
        SymTerm p2{iconst_neg, {SymFactor::charge(out.Mm), SymFactor::charge(out.ap)}};
        SymTerm p3{lin4, {SymFactor::ham(V2, 1)}};
        out.Rt2 = SymmetryOpSpec{{p1, p2, p3}, "cubic symmetry, lower partner"};
    }

    std::ostringstream prov;
    prov << "linear-in-time charge: shape=" << W.note() << ", mt=" << mt << ", n=" << n
         << ", k=" << fam.k << "; probe residual " << res.max_abs;
    out.provenance = prov.str();
    out.pair.provenance = out.provenance;
    return out;
}

// ---------------------------------------------------------------------------

FourthOrderOps fourth_order_family_build(const FourthOrderFamily& fam, const Grid1D& probe) {
    require(fam.f.valid(), "invalid-kind", "shape function is required");
    require(fam.beta > 0.0, "nonpositive-beta",
            "the rotating coefficient pair needs a positive restoring constant");
    for (int i = 0; i < probe.n; ++i)
        require(probe.point(i) != 0.0, "window-violation",
                "probe grid touches the origin of the centrifugal terms");
    const ShapeFn f = fam.f;
    const double beta = fam.beta, c = fam.c, a0 = fam.a0, x0 = fam.x0;

    const OdeResidual res =
        ode_residual(ResidualKind::eq40, f, probe, {beta, c, a0, x0});
    require(res.max_abs <= fam.residual_gate, "eq40-residual-too-large",
            "shape fails the consistency equation (max residual " + std::to_string(res.max_abs) +
                ")");

    auto int_f = std::make_shared<CumulativeIntegral>([f](double z) { return f(z); }, x0, 2e-4);
    auto int_zf2 = std::make_shared<CumulativeIntegral>(
        [f](double z) {
            const double v = f(z);
            return z * v * v;
        },
        x0, 2e-4);

    FourthOrderOps out;
    out.V2_of = [f, beta, c, a0, int_f, int_zf2](double x) {
        require(x != 0.0, "window-violation", "potential coefficients are singular at the origin");
        const auto j = f.jet(x);
        const double quad = (4.0 * c - 2.0) * int_f->to(x) - 4.0 * int_zf2->to(x);
        return 2.0 * j[1] + 4.0 * j[0] * j[0] + 2.0 * (1.0 - 2.0 * c) * j[0] / x +
               beta * x * x / 8.0 + a0 + quad / (x * x);
    };
    out.W_of = [f, c](double x) {
        if (c != 0.0)
            require(x != 0.0, "window-violation", "first-order coefficient singular at origin");
        return -2.0 * f(x) + (c == 0.0 ? 0.0 : c / x);
    };
    out.b_of = [f, beta, a0, V2 = out.V2_of](double x) {
        const auto j = f.jet(x);
        return j[1] + 2.0 * j[0] * j[0] - V2(x) + beta * x * x / 4.0 + a0;
    };

    const double wfreq = std::sqrt(2.0 * beta);
    out.theta = [th0 = fam.theta0, la0 = fam.lambda0, wfreq](double t) {
        return th0 * std::cos(wfreq * t) - (2.0 * la0 / wfreq) * std::sin(wfreq * t);
    };
    out.lambda = [th0 = fam.theta0, la0 = fam.lambda0, wfreq](double t) {
        return la0 * std::cos(wfreq * t) + 0.5 * th0 * wfreq * std::sin(wfreq * t);
    };

    out.pair.V2 = [V2 = out.V2_of](double x, double) { return V2(x); };
    out.pair.V1 = [V2 = out.V2_of, f](double x, double) { return V2(x) - 4.0 * f.d(1, x); };
    out.pair.charge = second_order_charge(
        out.theta,
        [f, th = out.theta, la = out.lambda](double x, double t) {
            return cplx(th(t) * f(x), -0.5 * la(t) * x);
        },
        [f, th = out.theta, la = out.lambda](double x, double t) {
            return cplx(th(t) * f.d(1, x), -0.5 * la(t));
        },
        [b = out.b_of, W = out.W_of, th = out.theta, la = out.lambda](double x, double t) {
            return cplx(th(t) * b(x), la(t) * x * W(x));
        },
        false, "rotating fourth-order charge");
    out.pair.halfline = (c != 0.0);

    std::ostringstream prov;
    prov << "rotating fourth-order charge: shape=" << f.note() << ", beta=" << beta
         << ", c=" << c << ", a0=" << a0 << ", x0=" << x0 << ", theta0=" << fam.theta0
         << ", lambda0=" << fam.lambda0
         << "; integration constant of the centrifugal quadrature gauged to zero; probe residual "
         << res.max_abs;
    out.provenance = prov.str();
    out.pair.provenance = out.provenance;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct NonStatCtx {
    Profile f1;
    double sigma, delta, lambda0;
    bool V2_zero;

    double f0(double t) const {
        return sigma * std::exp(lambda0 * t) + delta * std::exp(-lambda0 * t);
    }
    double f0dot(double t) const {
        return lambda0 * (sigma * std::exp(lambda0 * t) - delta * std::exp(-lambda0 * t));
    }
    double D(double x, double t) const {
        const double v = f1(x) + f0(t);
        require(std::abs(v) > 1e-12, "vanishing-denominator",
                "shape plus exponential combination vanishes at evaluation point");
        return v;
    }
    double N(double x) const {
        const auto j = f1.jet(x);
        return lambda0 * lambda0 * sigma * delta +
               0.5 * (j.d1 * j.d3 - 0.5 * j.d2 * j.d2) -
               0.25 * lambda0 * lambda0 * j.v * j.v;
    }
    double V2(double x) const {
        if (V2_zero) return 0.0;
        const double d1 = f1.d(1, x);
        require(std::abs(d1) > 1e-10, "vanishing-denominator",
                "shape derivative vanishes at evaluation point");
        return N(x) / (d1 * d1);
    }
    double f(double x, double t) const { return 0.5 * f1.d(1, x) / D(x, t); }
    double fx(double x, double t) const {
        const auto j = f1.jet(x);
        const double dd = D(x, t);
        return 0.5 * (j.d2 * dd - j.d1 * j.d1) / (dd * dd);
    }
    double c(double x, double t) const { return 0.5 * f0dot(t) / D(x, t); }
    double b(double x, double t) const {
        const double ff = f(x, t);
        return fx(x, t) + 2.0 * ff * ff - V2(x);
    }
};

} // namespace

NonStatOps nonstat_stationary_pair(const NonStatFamily& fam, const Grid1D& probe) {
    require(fam.f1.valid(), "invalid-kind", "shape profile is required");
    require(fam.lambda0 != 0.0, "invalid-extent", "exponential rate must be nonzero");

    NonStatCtx ctx{fam.f1, fam.sigma, fam.delta, fam.lambda0, false};

    // identically-vanishing numerator => free stationary partner
    double nscale = std::abs(fam.lambda0 * fam.lambda0 * fam.sigma * fam.delta);
    double nmax = 0.0;
    for (int i = 0; i < probe.n; ++i) {
        const double x = probe.point(i);
        const auto j = ctx.f1.jet(x);
        nmax = std::max(nmax, std::abs(ctx.N(x)));
        nscale = std::max({nscale, std::abs(0.5 * j.d1 * j.d3), std::abs(0.25 * j.d2 * j.d2),
                           std::abs(0.25 * fam.lambda0 * fam.lambda0 * j.v * j.v)});
    }
    ctx.V2_zero = nmax <= 1e-10 * std::max(nscale, 1.0);

    NonStatOps out;
    out.lambda0 = fam.lambda0;
    out.V2_zero = ctx.V2_zero;
    out.f = [ctx](double x, double t) { return ctx.f(x, t); };
    out.b = [ctx](double x, double t) { return ctx.b(x, t); };
    out.c = [ctx](double x, double t) { return ctx.c(x, t); };
    out.V2_of = [ctx](double x) { return ctx.V2(x); };

    out.pair.V2 = [ctx](double x, double) { return ctx.V2(x); };
    out.pair.V1 = [ctx](double x, double t) { return ctx.V2(x) - 4.0 * ctx.fx(x, t); };
    out.pair.charge = second_order_charge(
        [](double) { return 1.0; },
        [ctx](double x, double t) { return cplx(ctx.f(x, t), 0.0); },
        [ctx](double x, double t) { return cplx(ctx.fx(x, t), 0.0); },
        [ctx](double x, double t) { return cplx(ctx.b(x, t), ctx.c(x, t)); }, true,
        "stationary-partner charge");

    const ChargeSpec qm = adjoint_charge(out.pair.charge);
    out.R1 = symmetry_product(out.pair.charge, qm, "charge times its reverse");
    out.R2 = symmetry_product(qm, out.pair.charge, "reverse times the charge");

    std::ostringstream prov;
    prov << "stationary partner: f1=" << fam.f1.describe() << ", sigma=" << fam.sigma
         << ", delta=" << fam.delta << ", rate=" << fam.lambda0
         << "; integration constant of the middle coefficient gauged to zero"
         << (ctx.V2_zero ? "; partner potential detected identically zero" : "");
    out.provenance = prov.str();
    out.pair.provenance = out.provenance;

    // stationarity certificate: the only closure relation that constrains the
    // partner potential, sampled at three times
    const auto r = nonstat_constraint_residuals(
        out, probe, {0.0, 0.2 / std::abs(fam.lambda0), 0.4 / std::abs(fam.lambda0)});
    require(r[3] <= fam.stationarity_gate, "V2-not-stationary",
            "closure relation residual " + std::to_string(r[3]) +
                " exceeds the stationarity gate; derivative content of the shape cannot certify "
                "a stationary partner");
    return out;
}

std::array<double, 4> nonstat_constraint_residuals(const NonStatOps& ops, const Grid1D& probe,
                                                   const std::vector<double>& times) {
    const Bivar &f = ops.f, &b = ops.b, &c = ops.c;
    const auto& V2 = ops.V2_of;

    std::array<double, 4> worst{0.0, 0.0, 0.0, 0.0};
    const double dt = 1e-4;
    for (double t : times) {
        for (int i = 0; i < probe.n; ++i) {
            const double x = probe.point(i);
            const double dx = 1e-3 * (1.0 + std::abs(x));

            auto x1 = [dx](auto&& fn, double u) {
                return (fn(u - 2 * dx) - 8.0 * fn(u - dx) + 8.0 * fn(u + dx) - fn(u + 2 * dx)) /
                       (12.0 * dx);
            };
            auto x2 = [dx](auto&& fn, double u) {
                return (-fn(u - 2 * dx) + 16.0 * fn(u - dx) - 30.0 * fn(u) + 16.0 * fn(u + dx) -
                        fn(u + 2 * dx)) /
                       (12.0 * dx * dx);
            };

            auto f_x = [&](double u) { return f(u, t); };
            auto b_x = [&](double u) { return b(u, t); };
            auto c_x = [&](double u) { return c(u, t); };

            const double ft = (f(x, t + dt) - f(x, t - dt)) / (2.0 * dt);
            const double bt = (b(x, t + dt) - b(x, t - dt)) / (2.0 * dt);
            const double ct = (c(x, t + dt) - c(x, t - dt)) / (2.0 * dt);

            const double fx1 = x1(f_x, x), fx2 = x2(f_x, x);
            const double bx1 = x1(b_x, x), bx2 = x2(b_x, x);
            const double cx1 = x1(c_x, x), cx2 = x2(c_x, x);
            const double V2x1 = x1(V2, x), V2x2 = x2(V2, x);

            worst[0] = std::max(worst[0], std::abs(ft - cx1));
            worst[1] = std::max(worst[1], std::abs(bt + cx2 + 4.0 * c(x, t) * fx1));
            worst[2] = std::max(worst[2], std::abs(fx2 + 4.0 * f(x, t) * fx1 - V2x1 - bx1));
            worst[3] = std::max(worst[3], std::abs(ct + 2.0 * f(x, t) * V2x1 - bx2 -
                                                   4.0 * b(x, t) * fx1 - V2x2));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

TDOscOps td_oscillator_pair(const TDOscFamily& fam, const Grid1D& probe) {
    require(fam.rho.valid(), "invalid-kind", "scale profile is required");
    const Profile rho = fam.rho;

    TDOscOps out;
    out.base = nonstat_stationary_pair(fam.base, probe);

    auto tau = std::make_shared<CumulativeIntegral>(
        [rho](double t) {
            const double r = positive_scale(rho, t, "scale profile");
            return 1.0 / (r * r);
        },
        0.0, 1e-3);
    out.tau_of_t = [tau](double t) { return tau->to(t); };
    out.y_of = [rho](double x, double t) {
        return x / positive_scale(rho, t, "scale profile");
    };

    const Bivar bf = out.base.f, bb = out.base.b, bc = out.base.c;
    const auto bV2 = out.base.V2_of;

    out.pair.V2 = [rho, bV2](double x, double t) {
        const auto r = rho.jet(t);
        require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
        return bV2(x / r.v) / (r.v * r.v) - (r.d2 / (4.0 * r.v)) * x * x;
    };
    out.pair.V1 = [rho, bV2, bf, bb, tau](double x, double t) {
        const auto r = rho.jet(t);
        require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
        const double y = x / r.v, ta = tau->to(t);
        const double fv = bf(y, ta);
        const double fy = bb(y, ta) - 2.0 * fv * fv + bV2(y); // middle coefficient inverted
        const double V2 = bV2(y) / (r.v * r.v) - (r.d2 / (4.0 * r.v)) * x * x;
        return V2 - 4.0 * fy / (r.v * r.v);
    };
    out.pair.charge = second_order_charge(
        [rho](double t) {
            const double r = positive_scale(rho, t, "scale profile");
            return r * r;
        },
        [rho, bf, tau](double x, double t) {
            const auto r = rho.jet(t);
            require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
            const double gdot = 2.0 * r.v * r.d1;
            return cplx(r.v * bf(x / r.v, tau->to(t)), 0.25 * gdot * x);
        },
        [rho, bf, bb, bV2, tau](double x, double t) {
            const auto r = rho.jet(t);
            require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
            const double y = x / r.v, ta = tau->to(t);
            const double fv = bf(y, ta);
            const double fy = bb(y, ta) - 2.0 * fv * fv + bV2(y);
            return cplx(fy, 0.5 * r.v * r.d1);
        },
        [rho, bf, bb, bc, tau](double x, double t) {
            const auto r = rho.jet(t);
            require(r.v > 0.0, "nonpositive-rho", "scale profile must stay positive");
            const double y = x / r.v, ta = tau->to(t);
            const double g = r.v * r.v, gdot = 2.0 * r.v * r.d1;
            const double sq = 0.25 * gdot * x;
            const cplx Btil(bb(y, ta), bc(y, ta));
            const cplx F(r.v * bf(y, ta), sq);
            return Btil - cplx(0.0, 0.25 * gdot) + sq * sq / g +
                   2.0 * cplx(0.0, 1.0) * F * sq / g;
        },
        false, "stationary-partner charge in oscillator background");

    std::ostringstream prov;
    prov << "oscillator background: rho=" << describe_or(rho, "?") << "; "
         << out.base.provenance;
    out.provenance = prov.str();
    out.pair.provenance = out.provenance;
    return out;
}

} // namespace itw
