#include "intertwine/charge.hpp"

#include "intertwine/stencil.hpp"

namespace itw {

ChargeSpec first_order_charge(CBivar c1, CBivar c0, CBivar c1x, std::string note) {
    ChargeSpec q;
    q.order = 1;
    q.c1 = std::move(c1);
    q.c0 = std::move(c0);
    q.c1x = std::move(c1x);
    q.note = std::move(note);
    return q;
}

ChargeSpec second_order_charge(std::function<double(double)> g2, CBivar f, CBivar fx, CBivar w,
                               bool canonical, std::string note) {
    ChargeSpec q;
    q.order = 2;
    q.g2 = std::move(g2);
    q.f = std::move(f);
    q.fx = std::move(fx);
    q.w = std::move(w);
    q.canonical = canonical;
    q.note = std::move(note);
    return q;
}

ComplexField apply_charge(const ChargeSpec& q, const ComplexField& psi, double t) {
    require(q.order == 1 || q.order == 2, "unsupported-order",
            "charge order must be 1 or 2, got " + std::to_string(q.order));
    const Grid1D& g = psi.grid;
    ComplexField out(g);
    if (q.order == 1) {
        const ComplexField d1 = differentiate(psi, 1);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.point(i);
            out.values[i] = q.c1(x, t) * d1.values[i] + q.c0(x, t) * psi.values[i];
        }
        out.unreliable_band = d1.unreliable_band;
    } else {
        const ComplexField d1 = differentiate(psi, 1);
        const ComplexField d2 = differentiate(psi, 2);
        const double gt = q.g2(t);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.point(i);
            out.values[i] = gt * d2.values[i] - 2.0 * q.f(x, t) * d1.values[i] +
                            q.w(x, t) * psi.values[i];
        }
        out.unreliable_band = d2.unreliable_band;
    }
    return out;
}

ChargeSpec adjoint_charge(const ChargeSpec& q) {
    require(q.order == 1 || q.order == 2, "unsupported-order",
            "charge order must be 1 or 2, got " + std::to_string(q.order));
    if (q.adjoint_of) return *q.adjoint_of;
    ChargeSpec a;
    a.adjoint_of = std::make_shared<ChargeSpec>(q);
    a.order = q.order;
    a.note = q.note.empty() ? "adjoint" : "adjoint of " + q.note;
    if (q.order == 1) {
        const CBivar c1 = q.c1, c0 = q.c0, c1x = q.c1x;
        a.c1 = [c1](double x, double t) { return -std::conj(c1(x, t)); };
        a.c0 = [c0, c1x](double x, double t) { return std::conj(c0(x, t)) - std::conj(c1x(x, t)); };
        a.c1x = [c1x](double x, double t) { return -std::conj(c1x(x, t)); };
    } else {
        const CBivar f = q.f, fx = q.fx, w = q.w;
        a.g2 = q.g2;
        a.f = [f](double x, double t) { return -std::conj(f(x, t)); };
        a.fx = [fx](double x, double t) { return -std::conj(fx(x, t)); };
        a.w = [w, fx](double x, double t) {
            return std::conj(w(x, t)) + 2.0 * std::conj(fx(x, t));
        };
        a.canonical = false;
    }
    return a;
}

} // namespace itw
