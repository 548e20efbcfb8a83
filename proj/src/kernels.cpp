#include "intertwine/kernels.hpp"

#include "intertwine/parallel.hpp"
#include "intertwine/quadrature.hpp"
#include "intertwine/stencil.hpp"

namespace itw {

Snapshots make_snapshots(const TimeGrid& tg, std::vector<ComplexField> fields, EvolutionKind kind) {
    require(!fields.empty(), "too-few-snapshots", "snapshot sequence is empty");
    require(static_cast<int>(fields.size()) == tg.snapshots(), "grid-mismatch",
            "snapshot count does not match the time grid");
    for (const auto& f : fields) check_same_grid(fields.front(), f);
    Snapshots s;
    s.tg = tg;
    s.fields = std::move(fields);
    s.kind = kind;
    return s;
}

Snapshots sample_snapshots(const Grid1D& g, const TimeGrid& tg, const CBivar& psi,
                           EvolutionKind kind) {
    std::vector<ComplexField> fields;
    fields.reserve(tg.snapshots());
    for (int k = 0; k < tg.snapshots(); ++k) {
        const double t = tg.time(k);
        fields.push_back(sample_field(g, [&](double x) { return psi(x, t); }));
    }
    return make_snapshots(tg, std::move(fields), kind);
}

ComplexField hamiltonian_apply(const Bivar& V, const ComplexField& psi, double t) {
    ComplexField d2 = differentiate(psi, 2);
    ComplexField out(psi.grid);
    for (int i = 0; i < psi.grid.n; ++i)
        out.values[i] = -d2.values[i] + V(psi.grid.point(i), t) * psi.values[i];
    out.unreliable_band = d2.unreliable_band;
    return out;
}

namespace {

ResidualSeries residual_impl(const Bivar& V, const Snapshots& s, cplx time_factor) {
    require(s.fields.size() >= 3, "too-few-snapshots",
            "evolution residual needs at least 3 snapshots");
    const Grid1D& g = s.grid();
    const int inner = static_cast<int>(s.fields.size()) - 2;
    ResidualSeries out;
    out.times.resize(inner);
    out.l2.resize(inner);

    int band = 4;
    for (const auto& f : s.fields) band = std::max(band, f.unreliable_band + 4);
    out.band = band;

    std::vector<double> l2(inner);
    parallel_for(inner, [&](int j) {
        const int k = j + 1;
        const double t = s.tg.time(k);
        const ComplexField d2 = differentiate(s.fields[k], 2);
        ComplexField r(g);
        const double inv2dt = 1.0 / (2.0 * s.tg.dt);
        for (int i = 0; i < g.n; ++i) {
            const cplx dpsi_dt = (s.fields[k + 1].values[i] - s.fields[k - 1].values[i]) * inv2dt;
            r.values[i] = time_factor * dpsi_dt + d2.values[i] -
                          V(g.point(i), t) * s.fields[k].values[i];
        }
        l2[j] = l2_norm_interior(r, band);
    });
    for (int j = 0; j < inner; ++j) {
        out.times[j] = s.tg.time(j + 1);
        out.l2[j] = l2[j];
        out.max_l2 = std::max(out.max_l2, l2[j]);
    }
    return out;
}

} // namespace

ResidualSeries schrodinger_residual(const Bivar& V, const Snapshots& s) {
    return residual_impl(V, s, cplx(0.0, 1.0));
}

ResidualSeries diffusion_residual(const Bivar& V, const Snapshots& s) {
    return residual_impl(V, s, cplx(-1.0, 0.0));
}

ResidualSeries evolution_residual(const Bivar& V, const Snapshots& s) {
    return s.kind == EvolutionKind::schrodinger ? schrodinger_residual(V, s)
                                                : diffusion_residual(V, s);
}

ComplexField evolution_defect(const Bivar& V, const Snapshots& s, int k) {
    require(k >= 1 && k + 1 < static_cast<int>(s.fields.size()), "too-few-snapshots",
            "defect field needs snapshots on both sides of k");
    const Grid1D& g = s.grid();
    const cplx tf = s.kind == EvolutionKind::schrodinger ? cplx(0.0, 1.0) : cplx(-1.0, 0.0);
    const ComplexField d2 = differentiate(s.fields[k], 2);
    const double t = s.tg.time(k);
    ComplexField r(g);
    const double inv2dt = 1.0 / (2.0 * s.tg.dt);
    for (int i = 0; i < g.n; ++i) {
        const cplx dpsi_dt = (s.fields[k + 1].values[i] - s.fields[k - 1].values[i]) * inv2dt;
        r.values[i] = tf * dpsi_dt + d2.values[i] - V(g.point(i), t) * s.fields[k].values[i];
    }
    r.unreliable_band = d2.unreliable_band;
    return r;
}

Snapshots apply_charge_series(const ChargeSpec& q, const Snapshots& s) {
    Snapshots out;
    out.tg = s.tg;
    out.kind = s.kind;
    out.note = s.note;
    out.fields.resize(s.fields.size());
    parallel_for(static_cast<int>(s.fields.size()),
                 [&](int k) { out.fields[k] = apply_charge(q, s.fields[k], s.tg.time(k)); });
    return out;
}

} // namespace itw
