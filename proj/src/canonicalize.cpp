#include "intertwine/canonicalize.hpp"

#include <cmath>
#include <memory>

#include "intertwine/quadrature.hpp"

namespace itw {

CanonicalForm canonicalize_second_order(const Profile& g, const Profile& g1, const CBivar& F,
                                        const CBivar& B, const Grid1D& probe,
                                        std::pair<double, double> t_window) {
    require(t_window.second > t_window.first, "invalid-extent", "empty time window");

    // positivity of g across the window
    const int t_samples = 64;
    for (int k = 0; k <= t_samples; ++k) {
        const double t =
            t_window.first + (t_window.second - t_window.first) * k / double(t_samples);
        require(g(t) > 0.0, "nonpositive-g",
                "g(t) must stay positive on the window; g(" + std::to_string(t) +
                    ") = " + std::to_string(g(t)));
    }

    // Im F must equal gdot*x/4 + g1 (sampled check)
    double scale = 1e-12;
    for (int k = 0; k <= 8; ++k) {
        const double t = t_window.first + (t_window.second - t_window.first) * k / 8.0;
        for (int i = 0; i < probe.n; i += std::max(1, probe.n / 16)) {
            const double x = probe.point(i);
            scale = std::max(scale, std::abs(F(x, t)));
        }
    }
    for (int k = 0; k <= 8; ++k) {
        const double t = t_window.first + (t_window.second - t_window.first) * k / 8.0;
        const double gdot = g.d(1, t), g1v = g1(t);
        for (int i = 0; i < probe.n; i += std::max(1, probe.n / 16)) {
            const double x = probe.point(i);
            const double expected = gdot * x / 4.0 + g1v;
            require(std::abs(F(x, t).imag() - expected) <= 1e-8 * std::max(1.0, scale),
                    "imF-constraint-violated",
                    "Im F(x,t) must equal gdot*x/4 + g1(t); offending point x = " +
                        std::to_string(x) + ", t = " + std::to_string(t));
        }
    }

    auto tau_map = std::make_shared<CumulativeIntegral>([g](double t) { return 1.0 / g(t); }, 0.0,
                                                        5e-4);
    auto drift_map = std::make_shared<CumulativeIntegral>(
        [g, g1](double t) { return g1(t) / std::pow(g(t), 1.5); }, 0.0, 5e-4);
    auto phase_map = std::make_shared<CumulativeIntegral>(
        [g, g1](double t) {
            const double r = g1(t) / g(t);
            return r * r;
        },
        0.0, 5e-4);

    CanonicalForm out;
    out.tau_of_t = [tau_map](double t) { return tau_map->to(t); };
    out.y_of_xt = [g, drift_map](double x, double t) {
        return x / std::sqrt(g(t)) - 2.0 * drift_map->to(t);
    };

    // invert tau(t) by bisection (tau is strictly increasing since g > 0)
    const double t_lo = t_window.first, t_hi = t_window.second;
    auto t_of_tau = [tau_map, t_lo, t_hi](double tau) {
        double a = t_lo, b = t_hi;
        double fa = tau_map->to(a) - tau;
        for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = tau_map->to(mid) - tau;
            if ((fa <= 0.0) == (fm <= 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        return 0.5 * (a + b);
    };
    out.t_of_tau = t_of_tau;
    out.x_of_yt = [g, drift_map, t_of_tau](double y, double tau) {
        const double t = t_of_tau(tau);
        return std::sqrt(g(t)) * (y + 2.0 * drift_map->to(t));
    };

    out.multiplier = [g, g1, phase_map](double x, double t) {
        const double gv = g(t), gdot = g.d(1, t), g1v = g1(t);
        const double phase = gdot * x * x / (8.0 * gv) + g1v * x / gv - phase_map->to(t);
        return std::pow(gv, -0.25) * std::exp(cplx(0.0, phase));
    };

    out.potential_shift = [g, g1](double x, double t) {
        const double gv = g(t), gdot = g.d(1, t), gdd = g.d(2, t);
        const double g1v = g1(t), g1dot = g1.d(1, t);
        return (gdd / gv - gdot * gdot / (2.0 * gv * gv)) * x * x / 8.0 +
               (g1v * gdot / (gv * gv) - 2.0 * g1dot / gv) * x / 2.0;
    };

    // canonical charge in (y, tau): dyy - 2 ftil dy + wtil with
    //   ftil(y,tau) = Re F / sqrt(g)
    //   wtil(y,tau) = B + (i/4) gdot - (gdot x/4 + g1)^2 / g - 2i F (gdot x/4 + g1)/g
    auto x_of = out.x_of_yt;
    auto t_of = out.t_of_tau;
    CBivar ftil = [F, g, x_of, t_of](double y, double tau) {
        const double t = t_of(tau);
        const double x = x_of(y, tau);
        return cplx(F(x, t).real() / std::sqrt(g(t)), 0.0);
    };
    // x-derivative of Re F via a five-point stencil; dy = sqrt(g) dx cancels
    // the 1/sqrt(g) in ftil
    CBivar ftil_y = [F, x_of, t_of](double y, double tau) {
        const double t = t_of(tau);
        const double x = x_of(y, tau);
        const double dh = 1e-5 * (1.0 + std::abs(x));
        const double d = (-F(x + 2 * dh, t).real() + 8.0 * F(x + dh, t).real() -
                          8.0 * F(x - dh, t).real() + F(x - 2 * dh, t).real()) /
                         (12.0 * dh);
        return cplx(d, 0.0);
    };
    CBivar wtil = [B, F, g, g1, x_of, t_of](double y, double tau) {
        const double t = t_of(tau);
        const double x = x_of(y, tau);
        const double gv = g(t), gdot = g.d(1, t);
        const double imF = gdot * x / 4.0 + g1(t);
        return B(x, t) + cplx(0.0, 0.25) * gdot - imF * imF / gv -
               cplx(0.0, 2.0) * F(x, t) * imF / gv;
    };
    out.charge_yt = second_order_charge([](double) { return 1.0; }, ftil, ftil_y, wtil,
                                        /*canonical=*/true, "canonical reduction");
    return out;
}

} // namespace itw
