#include "intertwine/propagate.hpp"

#include <algorithm>
#include <cmath>

#include "intertwine/parallel.hpp"
#include "intertwine/quadrature.hpp"
#include "intertwine/spline.hpp"

namespace itw {

namespace {

// Tridiagonal solve (Thomas) for the interior unknowns; the matrix is
// diagonally dominant for any dt because the Numerov mass matrix contributes
// 10/12 on the diagonal and 1/12 off it.
void thomas_solve(std::vector<cplx>& sub, std::vector<cplx>& diag, std::vector<cplx>& sup,
                  std::vector<cplx>& rhs) {
    const int m = static_cast<int>(diag.size());
    for (int i = 1; i < m; ++i) {
        const cplx w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[m - 1] /= diag[m - 1];
    for (int i = m - 2; i >= 0; --i) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

double edge_band_amplitude(const std::vector<cplx>& v) {
    double a = 0.0;
    const int n = static_cast<int>(v.size());
    for (int i = 0; i < 4; ++i) {
        a = std::max(a, std::abs(v[i]));
        a = std::max(a, std::abs(v[n - 1 - i]));
    }
    return a;
}

} // namespace

Snapshots propagate(const Bivar& V, const ComplexField& psi0, const TimeGrid& tg,
                    const PropagateOptions& opt) {
    const Grid1D& g = psi0.grid;
    const int n = g.n;
    const int m = n - 2; // interior unknowns, Dirichlet walls
    require(opt.store_every >= 1, "invalid-extent", "store_every must be positive");
    require(tg.steps % opt.store_every == 0, "grid-mismatch",
            "step count must be a multiple of store_every");

    const cplx z = opt.kind == EvolutionKind::schrodinger ? cplx(0.0, 0.5 * tg.dt)
                                                          : cplx(0.5 * tg.dt, 0.0);
    const double ih2 = 1.0 / (g.h * g.h);

    std::vector<cplx> w = psi0.values;
    w.front() = 0.0;
    w.back() = 0.0;

    Snapshots out;
    out.kind = opt.kind;
    out.tg = make_time_grid(tg.t0, tg.dt * opt.store_every, tg.steps / opt.store_every);
    out.fields.reserve(out.tg.snapshots());
    {
        ComplexField f0(g);
        f0.values = w;
        out.fields.push_back(std::move(f0));
    }
    out.norms.push_back(l2_norm(out.fields.front()));

    std::vector<double> Vm(n);
    std::vector<cplx> sub(m), diag(m), sup(m), rhs(m);

    for (int step = 0; step < tg.steps; ++step) {
        const double tm = tg.time(step) + 0.5 * tg.dt;
        double vmax = 0.0;
        for (int i = 0; i < n; ++i) {
            Vm[i] = V(g.point(i), tm);
            vmax = std::max(vmax, std::abs(Vm[i]));
        }
        require(vmax * tg.dt <= opt.stability_safety, "unstable-potential",
                "potential amplitude too large for the time step");

        // row i of C (interior index j = i-1): [-ih2 + V_{i-1}/12, 2 ih2 + 10 V_i/12,
        //                                      -ih2 + V_{i+1}/12]
        for (int j = 0; j < m; ++j) {
            const int i = j + 1;
            const cplx cs = -ih2 + Vm[i - 1] / 12.0;
            const cplx cd = 2.0 * ih2 + 10.0 * Vm[i] / 12.0;
            const cplx cp = -ih2 + Vm[i + 1] / 12.0;
            sub[j] = (1.0 / 12.0) + z * cs;
            diag[j] = (10.0 / 12.0) + z * cd;
            sup[j] = (1.0 / 12.0) + z * cp;
            // (A - zC) w with w_0 = w_{n-1} = 0
            rhs[j] = ((1.0 / 12.0) - z * cs) * w[i - 1] + ((10.0 / 12.0) - z * cd) * w[i] +
                     ((1.0 / 12.0) - z * cp) * w[i + 1];
        }
        thomas_solve(sub, diag, sup, rhs);
        for (int j = 0; j < m; ++j) w[j + 1] = rhs[j];

        if ((step + 1) % opt.store_every == 0) {
            ComplexField f(g);
            f.values = w;
            out.fields.push_back(std::move(f));
            const double nrm = l2_norm(out.fields.back());
            out.norms.push_back(nrm);
            if (!out.boundary_leak && edge_band_amplitude(w) > opt.leak_threshold * nrm) {
                out.boundary_leak = true;
                out.leak_step = step + 1;
            }
        }
    }
    for (double nrm : out.norms)
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(nrm - out.norms.front()));
    return out;
}

Snapshots separated_solution(const SeparatedSpec& spec, const Grid1D& grid, const TimeGrid& tg) {
    require(spec.level >= 0 && spec.level < static_cast<int>(spec.modes.energies.size()),
            "invalid-extent", "mode level out of range");
    const ComplexField& mode = spec.modes.states[spec.level];
    std::vector<double> ys(mode.grid.n), re(mode.grid.n);
    for (int i = 0; i < mode.grid.n; ++i) {
        ys[i] = mode.grid.point(i);
        re[i] = mode.values[i].real();
    }
    RealSpline phi(ys, re);
    const double E = spec.modes.energies[spec.level];

    CumulativeIntegral tau(
        [&](double t) {
            const double r = spec.rho(t);
            require(r > 0.0, "nonpositive-rho", "scale factor must stay positive");
            return 1.0 / (r * r);
        },
        0.0, std::min(1e-3, tg.dt));

    std::vector<double> taus(tg.snapshots());
    for (int k = 0; k < tg.snapshots(); ++k) taus[k] = tau.to(tg.time(k));

    std::vector<ComplexField> fields(tg.snapshots());
    parallel_for(tg.snapshots(), [&](int k) {
        const double t = tg.time(k);
        const auto rj = spec.rho.jet(t);
        require(rj.v > 0.0, "nonpositive-rho", "scale factor must stay positive");
        const auto mj = spec.mu.jet(t);
        const double gam = spec.gamma(t);
        const double amp = 1.0 / std::sqrt(rj.v);
        ComplexField f(grid);
        for (int i = 0; i < grid.n; ++i) {
            const double x = grid.point(i);
            const double y = x / rj.v + mj.v;
            if (!phi.in_range(y)) continue;
            const double gph = -(rj.d1 / (4.0 * rj.v)) * x * x + 0.5 * rj.v * mj.d1 * x + gam;
            f.values[i] = amp * phi(y) * std::exp(cplx(0.0, -(gph + E * taus[k])));
        }
        fields[k] = std::move(f);
    });
    Snapshots s = make_snapshots(tg, std::move(fields), EvolutionKind::schrodinger);
    s.note = "separated mode";
    for (const auto& f : s.fields) s.norms.push_back(l2_norm(f));
    return s;
}

Snapshots r_separation_forward(const RMap& map, const Snapshots& psi, const Grid1D& y_grid) {
    const Grid1D& xg = psi.grid();
    std::vector<double> xs(xg.n);
    for (int i = 0; i < xg.n; ++i) xs[i] = xg.point(i);

    std::vector<ComplexField> fields(psi.fields.size());
    parallel_for(static_cast<int>(psi.fields.size()), [&](int k) {
        const double t = psi.tg.time(k);
        const auto rj = map.rho.jet(t);
        require(rj.v > 0.0, "nonpositive-rho", "scale factor must stay positive");
        const auto mj = map.mu.jet(t);
        const double gam = map.gamma(t);
        ComplexSpline sp(xs, psi.fields[k].values);
        ComplexField f(y_grid);
        for (int i = 0; i < y_grid.n; ++i) {
            const double y = y_grid.point(i);
            const double x = rj.v * (y - mj.v);
            if (!sp.in_range(x)) continue;
            const double gph = -(rj.d1 / (4.0 * rj.v)) * x * x + 0.5 * rj.v * mj.d1 * x + gam;
            f.values[i] = std::sqrt(rj.v) * std::exp(cplx(0.0, gph)) * sp(x);
        }
        f.unreliable_band = psi.fields[k].unreliable_band;
        fields[k] = std::move(f);
    });
    Snapshots s = make_snapshots(psi.tg, std::move(fields), psi.kind);
    s.note = "separation frame";
    return s;
}

Snapshots r_separation_inverse(const RMap& map, const Snapshots& phi, const Grid1D& x_grid) {
    const Grid1D& yg = phi.grid();
    std::vector<double> ys(yg.n);
    for (int i = 0; i < yg.n; ++i) ys[i] = yg.point(i);

    std::vector<ComplexField> fields(phi.fields.size());
    parallel_for(static_cast<int>(phi.fields.size()), [&](int k) {
        const double t = phi.tg.time(k);
        const auto rj = map.rho.jet(t);
        require(rj.v > 0.0, "nonpositive-rho", "scale factor must stay positive");
        const auto mj = map.mu.jet(t);
        const double gam = map.gamma(t);
        ComplexSpline sp(ys, phi.fields[k].values);
        ComplexField f(x_grid);
        for (int i = 0; i < x_grid.n; ++i) {
            const double x = x_grid.point(i);
            const double y = x / rj.v + mj.v;
            if (!sp.in_range(y)) continue;
            const double gph = -(rj.d1 / (4.0 * rj.v)) * x * x + 0.5 * rj.v * mj.d1 * x + gam;
            f.values[i] = std::exp(cplx(0.0, -gph)) * sp(y) / std::sqrt(rj.v);
        }
        f.unreliable_band = phi.fields[k].unreliable_band;
        fields[k] = std::move(f);
    });
    Snapshots s = make_snapshots(phi.tg, std::move(fields), phi.kind);
    s.note = "laboratory frame";
    return s;
}

Snapshots fp_transform(const Snapshots& in, const Bivar& U, const std::string& direction) {
    double sign;
    if (direction == "fp-to-diffusion") {
        sign = +0.5;
        double scale = 0.0, imax = 0.0;
        for (const auto& f : in.fields)
            for (const cplx& v : f.values) {
                scale = std::max(scale, std::abs(v));
                imax = std::max(imax, std::abs(v.imag()));
            }
        require(imax <= 1e-12 * std::max(scale, 1e-300), "complex-input-for-fp",
                "drift-form density must be real");
    } else if (direction == "diffusion-to-fp") {
        sign = -0.5;
    } else {
        fail("invalid-kind", "direction must be fp-to-diffusion or diffusion-to-fp");
    }

    const Grid1D& g = in.grid();
    std::vector<ComplexField> fields(in.fields.size());
    parallel_for(static_cast<int>(in.fields.size()), [&](int k) {
        const double t = in.tg.time(k);
        ComplexField f(g);
        for (int i = 0; i < g.n; ++i)
            f.values[i] = in.fields[k].values[i] * std::exp(sign * U(g.point(i), t));
        f.unreliable_band = in.fields[k].unreliable_band;
        fields[k] = std::move(f);
    });
    Snapshots s = make_snapshots(in.tg, std::move(fields), EvolutionKind::diffusion);
    s.note = direction;
    return s;
}

} // namespace itw
