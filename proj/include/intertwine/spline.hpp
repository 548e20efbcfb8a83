#pragma once

#include <complex>
#include <vector>

#include "intertwine/errors.hpp"

namespace itw {

// Natural cubic spline on a strictly increasing knot sequence. Evaluation
// outside the knot range clamps to the end polynomial; callers that care
// about extrapolation check the range themselves.
template <typename T>
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> xs, std::vector<T> ys) : x_(std::move(xs)), y_(std::move(ys)) {
        const int n = static_cast<int>(x_.size());
        require(n >= 3 && y_.size() == x_.size(), "too-few-points",
                "spline needs at least 3 knots");
        for (int i = 1; i < n; ++i)
            require(x_[i] > x_[i - 1], "invalid-extent", "spline knots must increase");
        // solve the tridiagonal system for second derivatives (natural ends)
        m_.assign(n, T{});
        std::vector<double> diag(n, 0.0), sup(n, 0.0);
        std::vector<T> rhs(n, T{});
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for (int i = 1; i < n - 1; ++i) {
            const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (hl + hr);
            sup[i] = hr;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
        }
        // Thomas sweep (sub-diagonal for row i is hl, zero on end rows)
        std::vector<double> cp(n, 0.0);
        std::vector<T> dp(n, T{});
        cp[0] = 0.0;
        dp[0] = rhs[0];
        for (int i = 1; i < n; ++i) {
            const double sub = (i < n - 1) ? (x_[i] - x_[i - 1]) : 0.0;
            const double denom = diag[i] - sub * cp[i - 1];
            cp[i] = (i < n - 1 ? sup[i] : 0.0) / denom;
            dp[i] = (rhs[i] - sub * dp[i - 1]) / denom;
        }
        m_[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) m_[i] = dp[i] - cp[i] * m_[i + 1];
    }

    T operator()(double x) const { return eval(x, 0); }

    // k-th derivative, k in 0..3 (3rd is piecewise constant, 4th would be 0)
    T eval(double x, int k) const {
        const int n = static_cast<int>(x_.size());
        int lo = 0, hi = n - 1;
        if (x <= x_[0])
            hi = 1;
        else if (x >= x_[n - 1])
            lo = n - 2;
        else {
            while (hi - lo > 1) {
                const int mid = (lo + hi) / 2;
                (x_[mid] <= x ? lo : hi) = mid;
            }
        }
        const double h = x_[hi] - x_[lo];
        const double a = (x_[hi] - x) / h, b = (x - x_[lo]) / h;
        switch (k) {
        case 0:
            return a * y_[lo] + b * y_[hi] +
                   ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * (h * h) / 6.0;
        case 1:
            return (y_[hi] - y_[lo]) / h +
                   ((3.0 * b * b - 1.0) * m_[hi] - (3.0 * a * a - 1.0) * m_[lo]) * h / 6.0;
        case 2:
            return a * m_[lo] + b * m_[hi];
        case 3:
            return (m_[hi] - m_[lo]) / h;
        default:
            fail("unsupported-order", "spline derivatives go up to order 3");
        }
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    bool in_range(double x) const { return x >= x_.front() && x <= x_.back(); }

private:
    std::vector<double> x_;
    std::vector<T> y_;
    std::vector<T> m_; // second derivatives at knots
};

using RealSpline = CubicSpline<double>;
using ComplexSpline = CubicSpline<std::complex<double>>;

} // namespace itw
