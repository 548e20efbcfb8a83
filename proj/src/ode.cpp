#include "intertwine/ode.hpp"

#include <cmath>

#include "intertwine/quadrature.hpp"

namespace itw {

ShapeFn::ShapeFn(Profile p) {
    require(p.valid(), "invalid-kind", "shape profile is empty");
    exact_order_ = p.reduced_accuracy() ? 3 : 4;
    note_ = p.describe();
    jet_ = [p](double x) -> Jet5 {
        const Profile::Jet j = p.jet(x);
        return {j.v, j.d1, j.d2, j.d3, j.d4};
    };
}

ShapeFn::ShapeFn(std::function<Jet5(double)> jet, int exact_order, std::string note)
    : jet_(std::move(jet)), exact_order_(exact_order), note_(std::move(note)) {}

ShapeFn::Jet5 ShapeFn::jet(double x) const {
    require(valid(), "invalid-kind", "shape function is empty");
    return jet_(x);
}

RiccatiKind riccati_kind_from_string(const std::string& s) {
    if (s == "painleve4-riccati") return RiccatiKind::painleve4;
    if (s == "painleve2-riccati") return RiccatiKind::painleve2;
    if (s == "eq41-riccati") return RiccatiKind::eq41;
    fail("invalid-kind", "unknown flow kind '" + s + "'");
}

std::string to_string(RiccatiKind k) {
    switch (k) {
    case RiccatiKind::painleve4: return "painleve4-riccati";
    case RiccatiKind::painleve2: return "painleve2-riccati";
    default: return "eq41-riccati";
    }
}

ResidualKind residual_kind_from_string(const std::string& s) {
    if (s == "painleve4") return ResidualKind::painleve4;
    if (s == "painleve2") return ResidualKind::painleve2;
    if (s == "eq40") return ResidualKind::eq40;
    if (s == "eq411") return ResidualKind::eq411;
    if (s == "first-integral") return ResidualKind::first_integral;
    fail("invalid-kind", "unknown residual kind '" + s + "'");
}

namespace {

// Right-hand side y' = R(x, y) together with the partial derivatives needed
// to push derivatives of the solution through the flow equation.
struct Rhs {
    double m = 0, a = 0, k = 0, beta = 0, d = 0;
    RiccatiKind kind;

    double operator()(double x, double y) const {
        switch (kind) {
        case RiccatiKind::painleve4: return -2 * y * y - 2 * m * x * y - a;
        case RiccatiKind::painleve2: return y * y + k * x;
        default: return 2 * y * y - beta / 4 * x * x + d;
        }
    }
    double Rx(double x, double y) const {
        switch (kind) {
        case RiccatiKind::painleve4: return -2 * m * y;
        case RiccatiKind::painleve2: return k;
        default: return -beta / 2 * x;
        }
    }
    double Ry(double x, double y) const {
        switch (kind) {
        case RiccatiKind::painleve4: return -4 * y - 2 * m * x;
        case RiccatiKind::painleve2: return 2 * y;
        default: return 4 * y;
        }
    }
    double Rxx() const { return kind == RiccatiKind::eq41 ? -beta / 2 : 0.0; }
    double Rxy() const { return kind == RiccatiKind::painleve4 ? -2 * m : 0.0; }
    double Ryy() const {
        switch (kind) {
        case RiccatiKind::painleve4: return -4;
        case RiccatiKind::painleve2: return 2;
        default: return 4;
        }
    }

    ShapeFn::Jet5 jet(double x, double y) const {
        const double f1 = (*this)(x, y);
        const double f2 = Rx(x, y) + Ry(x, y) * f1;
        const double f3 = Rxx() + 2 * Rxy() * f1 + Ryy() * f1 * f1 + Ry(x, y) * f2;
        const double f4 = 3 * Rxy() * f2 + 3 * Ryy() * f1 * f2 + Ry(x, y) * f3;
        return {y, f1, f2, f3, f4};
    }
};

Rhs make_rhs(RiccatiKind kind, const std::vector<double>& params) {
    Rhs r;
    r.kind = kind;
    switch (kind) {
    case RiccatiKind::painleve4:
        require(params.size() == 2, "invalid-kind", "painleve4-riccati takes params {m, a}");
        r.m = params[0];
        r.a = params[1];
        break;
    case RiccatiKind::painleve2:
        require(params.size() == 1, "invalid-kind", "painleve2-riccati takes params {k}");
        r.k = params[0];
        break;
    default:
        require(params.size() == 2, "invalid-kind", "eq41-riccati takes params {beta, d}");
        r.beta = params[0];
        r.d = params[1];
        break;
    }
    return r;
}

double rk4_step(const Rhs& rhs, double x, double y, double h) {
    const double k1 = rhs(x, y);
    const double k2 = rhs(x + h / 2, y + h / 2 * k1);
    const double k3 = rhs(x + h / 2, y + h / 2 * k2);
    const double k4 = rhs(x + h, y + h * k3);
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

} // namespace

OdeSolution integrate_riccati(RiccatiKind kind, const std::vector<double>& params, double x_start,
                              double y_start, const Grid1D& grid) {
    const Rhs rhs = make_rhs(kind, params);
    OdeSolution sol;
    sol.grid = grid;
    sol.kind = kind;
    sol.params = params;

    const double pos = (x_start - grid.x_min) / grid.h;
    const int i0 = static_cast<int>(std::lround(pos));
    require(i0 >= 0 && i0 < grid.n && std::abs(x_start - grid.point(i0)) <= 1e-9 * std::max(1.0, std::abs(x_start)),
            "invalid-extent", "flow start point must coincide with a grid node");
    require(std::isfinite(y_start) && std::abs(y_start) < sol.blowup_magnitude, "blow-up-at-start",
            "flow initial value is already beyond the blow-up magnitude");

    std::vector<double> vals(grid.n, 0.0);
    vals[i0] = y_start;
    int lo = i0, hi = i0;
    double worst = 0.0;

    auto march = [&](int dir) {
        double y = y_start;
        for (int i = i0; dir > 0 ? i < grid.n - 1 : i > 0; i += dir) {
            const double x = grid.point(i);
            const double h = dir * grid.h;
            const double full = rk4_step(rhs, x, y, h);
            double half = rk4_step(rhs, x, y, h / 2);
            half = rk4_step(rhs, x + h / 2, half, h / 2);
            if (!std::isfinite(half) || std::abs(half) > sol.blowup_magnitude) {
                if (i == i0)
                    fail("blow-up-at-start",
                         "flow leaves the blow-up magnitude on the first step at x = " +
                             std::to_string(x));
                (dir > 0 ? sol.truncated_right : sol.truncated_left) = true;
                return;
            }
            worst = std::max(worst, std::abs(full - half) / 15.0);
            y = half;
            vals[i + dir] = y;
            (dir > 0 ? hi : lo) = i + dir;
        }
    };
    march(+1);
    march(-1);

    sol.lo = lo;
    sol.hi = hi;
    sol.max_step_error = worst;
    sol.values.assign(vals.begin() + lo, vals.begin() + hi + 1);
    return sol;
}

ShapeFn shape_from_solution(const OdeSolution& sol) {
    require(sol.hi - sol.lo + 1 >= 3, "too-few-points",
            "flow solution covers fewer than 3 grid points");
    std::vector<double> xs(sol.values.size());
    for (size_t j = 0; j < xs.size(); ++j) xs[j] = sol.grid.point(sol.lo + static_cast<int>(j));
    auto spl = std::make_shared<RealSpline>(xs, sol.values);
    const Rhs rhs = make_rhs(sol.kind, sol.params);
    const double x_lo = xs.front(), x_hi = xs.back();
    auto jet = [spl, rhs, x_lo, x_hi](double x) -> ShapeFn::Jet5 {
        require(x >= x_lo - 1e-12 && x <= x_hi + 1e-12, "window-violation",
                "shape queried outside the integrated range");
        const double y = (*spl)(x);
        return rhs.jet(x, y);
    };
    return ShapeFn(jet, 4, "riccati-flow(" + to_string(sol.kind) + ")");
}

namespace {

// Potential and gauge coefficient of the fourth-order oscillating family in
// terms of its shape function; shared by the residual and the family builder.
struct FourthOrderTerms {
    double beta, c, a0, x0;
    const ShapeFn* f;
    std::shared_ptr<CumulativeIntegral> int_f, int_zf2;

    FourthOrderTerms(double b, double cc, double aa, double xx, const ShapeFn& shape)
        : beta(b), c(cc), a0(aa), x0(xx), f(&shape) {
        const ShapeFn fn = shape;
        int_f = std::make_shared<CumulativeIntegral>([fn](double z) { return fn(z); }, x0, 2e-4);
        int_zf2 = std::make_shared<CumulativeIntegral>(
            [fn](double z) {
                const double v = fn(z);
                return z * v * v;
            },
            x0, 2e-4);
    }

    double V2(double x) const {
        const auto j = f->jet(x);
        const double quad = (4 * c - 2) * int_f->to(x) - 4 * int_zf2->to(x);
        return 2 * j[1] + 4 * j[0] * j[0] + 2 * (1 - 2 * c) * j[0] / x + beta / 8 * x * x + a0 +
               quad / (x * x);
    }
    double V2prime(double x) const {
        const auto j = f->jet(x);
        const double quad = (4 * c - 2) * int_f->to(x) - 4 * int_zf2->to(x);
        return 2 * j[2] + 8 * j[0] * j[1] + 2 * (1 - 2 * c) * (j[1] / x - j[0] / (x * x)) +
               beta / 4 * x - 2 * quad / (x * x * x) +
               ((4 * c - 2) * j[0] - 4 * x * j[0] * j[0]) / (x * x);
    }
    double b(double x) const {
        const auto j = f->jet(x);
        return j[1] + 2 * j[0] * j[0] - V2(x) + beta / 4 * x * x + a0;
    }
};

} // namespace

OdeResidual ode_residual(ResidualKind kind, const ShapeFn& shape, const Grid1D& sample,
                         const std::vector<double>& params) {
    require(shape.valid(), "invalid-kind", "shape function is empty");
    const int need = kind == ResidualKind::eq411 ? 4
                     : (kind == ResidualKind::eq40 || kind == ResidualKind::first_integral) ? 3
                                                                                            : 2;
    require(shape.exact_order() >= need, "insufficient-derivative-order",
            "residual needs derivatives up to order " + std::to_string(need) +
                " but the shape provides " + std::to_string(shape.exact_order()));

    OdeResidual out;
    out.xs.resize(sample.n);
    out.r.resize(sample.n);

    std::shared_ptr<FourthOrderTerms> fot;
    if (kind == ResidualKind::eq40) {
        require(params.size() == 4, "invalid-kind", "eq40 residual takes {beta, c, a0, x0}");
        fot = std::make_shared<FourthOrderTerms>(params[0], params[1], params[2], params[3], shape);
    }

    for (int i = 0; i < sample.n; ++i) {
        const double x = sample.point(i);
        const auto j = shape.jet(x);
        double r = 0;
        switch (kind) {
        case ResidualKind::painleve4: {
            require(params.size() == 3, "invalid-kind", "painleve4 residual takes {m, a, d}");
            const double m = params[0], a = params[1], d = params[2];
            r = j[2] - (j[1] * j[1] / (2 * j[0]) + 6 * j[0] * j[0] * j[0] +
                        8 * m * x * j[0] * j[0] + 2 * (m * m * x * x - m + a) * j[0] +
                        d / (2 * j[0]));
            break;
        }
        case ResidualKind::painleve2: {
            require(params.size() == 2, "invalid-kind", "painleve2 residual takes {mtilde, k}");
            const double mt = params[0], k = params[1];
            r = j[2] - (2 * j[0] * j[0] * j[0] + 4 * mt * x * j[0] + k);
            break;
        }
        case ResidualKind::eq40: {
            const double beta = params[0], c = params[1];
            r = -2 * j[0] * fot->V2prime(x) + 4 * fot->b(x) * j[1] + j[3] + 4 * j[1] * j[1] +
                4 * j[0] * j[2] + 2 * beta * x * j[0] - beta * c + beta / 2;
            break;
        }
        case ResidualKind::eq411: {
            require(params.size() == 1, "invalid-kind", "eq411 residual takes {lambda0}");
            const double l0 = params[0];
            r = j[4] - l0 * l0 * j[0];
            break;
        }
        case ResidualKind::first_integral: {
            require(params.size() == 3, "invalid-kind",
                    "first-integral residual takes {lambda0, sigma, delta}");
            const double l0 = params[0], sg = params[1], dl = params[2];
            r = 2 * j[3] * j[1] - j[2] * j[2] - l0 * l0 * j[0] * j[0] + 4 * l0 * l0 * sg * dl;
            break;
        }
        }
        out.xs[i] = x;
        out.r[i] = r;
        out.max_abs = std::max(out.max_abs, std::abs(r));
    }
    return out;
}

} // namespace itw
