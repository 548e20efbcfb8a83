#pragma once

#include <memory>
#include <string>
#include <vector>

namespace itw {

// Scalar profile u -> value with analytic derivatives up to order 4.
// Profiles describe time dependence (rho, mu, gamma, omega, ...) and shape
// functions (K, Phi, W, f1, ...). The family builders rely on the jets, so
// tabulated profiles (cubic spline: exact to d3, d4 absent) carry a
// reduced-accuracy flag that propagates through sums and products.
class Profile {
public:
    struct Jet {
        double v = 0, d1 = 0, d2 = 0, d3 = 0, d4 = 0;
        bool reduced = false;
    };

    Profile() = default;

    static Profile zero();
    static Profile constant(double v);
    static Profile polynomial(std::vector<double> ascending_coeffs);
    static Profile linear(double intercept, double slope);
    static Profile exponential(double amplitude, double rate);  // A e^{k u}
    static Profile trig(double amplitude, double omega, double phase); // A cos(w u + phase)
    static Profile cosh_p(double amplitude, double kappa);
    static Profile sinh_p(double amplitude, double kappa);
    static Profile power(double amplitude, double exponent);    // A u^p
    static Profile sum(Profile a, Profile b);
    static Profile product(Profile a, Profile b);
    static Profile tabulated(std::vector<double> u, std::vector<double> v);

    bool valid() const { return static_cast<bool>(node_); }

    Jet jet(double u) const;
    double operator()(double u) const { return jet(u).v; }
    double d(int k, double u) const;

    bool reduced_accuracy() const;
    std::string describe() const;

    struct Node;

protected:
    explicit Profile(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<const Node> node_;
};

} // namespace itw
