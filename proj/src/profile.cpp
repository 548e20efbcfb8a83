#include "intertwine/profile.hpp"

#include <cmath>
#include <sstream>

#include "intertwine/errors.hpp"
#include "intertwine/spline.hpp"

namespace itw {

using Jet = Profile::Jet;

struct Profile::Node {
    virtual ~Node() = default;
    virtual Jet jet(double u) const = 0;
    virtual bool reduced() const { return false; }
    virtual std::string describe() const = 0;
};

namespace {

struct PolyNode : Profile::Node {
    std::vector<double> c; // ascending
    explicit PolyNode(std::vector<double> cc) : c(std::move(cc)) {
        if (c.empty()) c.push_back(0.0);
    }
    Jet jet(double u) const override {
        Jet j;
        double* out[5] = {&j.v, &j.d1, &j.d2, &j.d3, &j.d4};
        for (int k = 0; k < 5; ++k) {
            // Horner over the k-th derivative polynomial
            double acc = 0.0;
            for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
                double fac = 1.0;
                for (int m = 0; m < k; ++m) fac *= (i - m);
                acc = acc * u + fac * c[i];
            }
            *out[k] = acc;
        }
        return j;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "poly(";
        for (size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
        os << ")";
        return os.str();
    }
};

struct ExpNode : Profile::Node {
    double A, k;
    ExpNode(double a, double kk) : A(a), k(kk) {}
    Jet jet(double u) const override {
        const double e = A * std::exp(k * u);
        return {e, k * e, k * k * e, k * k * k * e, k * k * k * k * e, false};
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "exp(A=" << A << ",rate=" << k << ")";
        return os.str();
    }
};

struct TrigNode : Profile::Node {
    double A, w, ph;
    TrigNode(double a, double ww, double p) : A(a), w(ww), ph(p) {}
    Jet jet(double u) const override {
        const double cs = std::cos(w * u + ph), sn = std::sin(w * u + ph);
        return {A * cs, -A * w * sn, -A * w * w * cs, A * w * w * w * sn, A * w * w * w * w * cs,
                false};
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "cos(A=" << A << ",w=" << w << ",phase=" << ph << ")";
        return os.str();
    }
};

struct CoshNode : Profile::Node {
    double A, k;
    bool even; // cosh if true, sinh if false
    CoshNode(double a, double kk, bool ev) : A(a), k(kk), even(ev) {}
    Jet jet(double u) const override {
        const double ch = std::cosh(k * u), sh = std::sinh(k * u);
        const double e0 = even ? ch : sh, e1 = even ? sh : ch;
        return {A * e0, A * k * e1, A * k * k * e0, A * k * k * k * e1, A * k * k * k * k * e0,
                false};
    }
    std::string describe() const override {
        std::ostringstream os;
        os << (even ? "cosh" : "sinh") << "(A=" << A << ",k=" << k << ")";
        return os.str();
    }
};

struct PowerNode : Profile::Node {
    double A, p;
    bool integral;
    PowerNode(double a, double pp) : A(a), p(pp) {
        integral = (p == std::floor(p)) && std::abs(p) < 64;
    }
    double pw(double u, double q) const {
        if (integral) {
            const long e = std::lround(q);
            if (e >= 0) {
                double r = 1.0;
                for (long i = 0; i < e; ++i) r *= u;
                return r;
            }
            double r = 1.0;
            for (long i = 0; i < -e; ++i) r *= u;
            return 1.0 / r;
        }
        require(u > 0.0, "window-violation",
                "power profile with non-integer exponent needs u > 0");
        return std::pow(u, q);
    }
    Jet jet(double u) const override {
        Jet j;
        double fac = A;
        double* out[5] = {&j.v, &j.d1, &j.d2, &j.d3, &j.d4};
        for (int k = 0; k < 5; ++k) {
            const double q = p - k;
            if (integral && p >= 0 && k > std::lround(p)) {
                *out[k] = 0.0; // monomial differentiated past its degree
            } else {
                *out[k] = fac * pw(u, q);
            }
            fac *= q;
        }
        return j;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "power(A=" << A << ",p=" << p << ")";
        return os.str();
    }
};

struct SumNode : Profile::Node {
    Profile a, b;
    SumNode(Profile x, Profile y) : a(std::move(x)), b(std::move(y)) {}
    Jet jet(double u) const override {
        const Jet ja = a.jet(u), jb = b.jet(u);
        return {ja.v + jb.v, ja.d1 + jb.d1, ja.d2 + jb.d2, ja.d3 + jb.d3, ja.d4 + jb.d4,
                ja.reduced || jb.reduced};
    }
    bool reduced() const override { return a.reduced_accuracy() || b.reduced_accuracy(); }
    std::string describe() const override { return a.describe() + " + " + b.describe(); }
};

struct ProductNode : Profile::Node {
    Profile a, b;
    ProductNode(Profile x, Profile y) : a(std::move(x)), b(std::move(y)) {}
    Jet jet(double u) const override {
        const Jet f = a.jet(u), g = b.jet(u);
        Jet j;
        j.v = f.v * g.v;
        j.d1 = f.d1 * g.v + f.v * g.d1;
        j.d2 = f.d2 * g.v + 2 * f.d1 * g.d1 + f.v * g.d2;
        j.d3 = f.d3 * g.v + 3 * f.d2 * g.d1 + 3 * f.d1 * g.d2 + f.v * g.d3;
        j.d4 = f.d4 * g.v + 4 * f.d3 * g.d1 + 6 * f.d2 * g.d2 + 4 * f.d1 * g.d3 + f.v * g.d4;
        j.reduced = f.reduced || g.reduced;
        return j;
    }
    bool reduced() const override { return a.reduced_accuracy() || b.reduced_accuracy(); }
    std::string describe() const override {
        return "(" + a.describe() + ")*(" + b.describe() + ")";
    }
};

struct TabNode : Profile::Node {
    RealSpline s;
    size_t n;
    TabNode(std::vector<double> u, std::vector<double> v) : s(std::move(u), std::move(v)) {}
    Jet jet(double u) const override {
        require(s.in_range(u), "window-violation",
                "tabulated profile queried outside its knot range");
        Jet j;
        j.v = s.eval(u, 0);
        j.d1 = s.eval(u, 1);
        j.d2 = s.eval(u, 2);
        j.d3 = s.eval(u, 3);
        j.d4 = 0.0;
        j.reduced = true;
        return j;
    }
    bool reduced() const override { return true; }
    std::string describe() const override { return "tabulated"; }
};

std::shared_ptr<const Profile::Node> wrap(Profile::Node* n) {
    return std::shared_ptr<const Profile::Node>(n);
}

} // namespace

// Factory definitions live here so the node types stay private.
struct ProfileAccess {
    static Profile make(std::shared_ptr<const Profile::Node> n);
};

Profile ProfileAccess::make(std::shared_ptr<const Profile::Node> n) {
    struct P : Profile {
        explicit P(std::shared_ptr<const Node> nn) : Profile(std::move(nn)) {}
    };
    return P(std::move(n));
}

Profile Profile::zero() { return constant(0.0); }
Profile Profile::constant(double v) { return polynomial({v}); }
Profile Profile::polynomial(std::vector<double> c) {
    return ProfileAccess::make(wrap(new PolyNode(std::move(c))));
}
Profile Profile::linear(double intercept, double slope) { return polynomial({intercept, slope}); }
Profile Profile::exponential(double amplitude, double rate) {
    return ProfileAccess::make(wrap(new ExpNode(amplitude, rate)));
}
Profile Profile::trig(double amplitude, double omega, double phase) {
    return ProfileAccess::make(wrap(new TrigNode(amplitude, omega, phase)));
}
Profile Profile::cosh_p(double amplitude, double kappa) {
    return ProfileAccess::make(wrap(new CoshNode(amplitude, kappa, true)));
}
Profile Profile::sinh_p(double amplitude, double kappa) {
    return ProfileAccess::make(wrap(new CoshNode(amplitude, kappa, false)));
}
Profile Profile::power(double amplitude, double exponent) {
    return ProfileAccess::make(wrap(new PowerNode(amplitude, exponent)));
}
Profile Profile::sum(Profile a, Profile b) {
    return ProfileAccess::make(wrap(new SumNode(std::move(a), std::move(b))));
}
Profile Profile::product(Profile a, Profile b) {
    return ProfileAccess::make(wrap(new ProductNode(std::move(a), std::move(b))));
}
Profile Profile::tabulated(std::vector<double> u, std::vector<double> v) {
    return ProfileAccess::make(wrap(new TabNode(std::move(u), std::move(v))));
}

Jet Profile::jet(double u) const {
    require(valid(), "invalid-kind", "profile was default-constructed");
    return node_->jet(u);
}

double Profile::d(int k, double u) const {
    require(k >= 0 && k <= 4, "unsupported-order", "profile jets stop at order 4");
    const Jet j = jet(u);
    switch (k) {
    case 0: return j.v;
    case 1: return j.d1;
    case 2: return j.d2;
    case 3: return j.d3;
    default: return j.d4;
    }
}

bool Profile::reduced_accuracy() const {
    require(valid(), "invalid-kind", "profile was default-constructed");
    return node_->reduced();
}

std::string Profile::describe() const {
    return valid() ? node_->describe() : "<empty>";
}

} // namespace itw
