#include "intertwine/eigen.hpp"

#include <cmath>

#include "intertwine/quadrature.hpp"

namespace itw {

namespace {

// Number of eigenvalues of the symmetric tridiagonal (diag, off) below lam,
// by the Sturm sign-change count of the LDL^T pivots.
int sturm_count(const std::vector<double>& diag, double off, double lam) {
    int cnt = 0;
    double q = 0.0;
    bool first = true;
    const double off2 = off * off;
    for (double d : diag) {
        q = d - lam - (first ? 0.0 : off2 / q);
        first = false;
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++cnt;
    }
    return cnt;
}

// Solve (T - lam I) x = rhs with partial pivoting; T symmetric tridiagonal.
void shifted_solve(const std::vector<double>& diag, double off, double lam,
                   std::vector<double>& x) {
    const int m = static_cast<int>(diag.size());
    std::vector<double> a(m), b(m - 1), c(m - 1, 0.0), rhs = x;
    for (int i = 0; i < m; ++i) a[i] = diag[i] - lam;
    for (int i = 0; i + 1 < m; ++i) b[i] = off;
    // forward elimination with row swaps (sub-diagonal is `off` everywhere)
    std::vector<double> sub(m - 1, off);
    for (int i = 0; i + 1 < m; ++i) {
        if (std::abs(sub[i]) > std::abs(a[i])) {
            std::swap(a[i], sub[i]);
            const double t = b[i];
            b[i] = a[i + 1];
            a[i + 1] = t;
            if (i + 2 < m) {
                c[i] = b[i + 1];
                b[i + 1] = 0.0;
            }
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (a[i] == 0.0) a[i] = 1e-300;
        const double mfac = sub[i] / a[i];
        a[i + 1] -= mfac * b[i];
        if (i + 2 < m) b[i + 1] -= mfac * c[i];
        rhs[i + 1] -= mfac * rhs[i];
    }
    if (a[m - 1] == 0.0) a[m - 1] = 1e-300;
    x[m - 1] = rhs[m - 1] / a[m - 1];
    if (m >= 2) x[m - 2] = (rhs[m - 2] - b[m - 2] * x[m - 1]) / a[m - 2];
    for (int i = m - 3; i >= 0; --i)
        x[i] = (rhs[i] - b[i] * x[i + 1] - c[i] * x[i + 2]) / a[i];
}

} // namespace

EigenResult stationary_eigensolve(const std::function<double(double)>& V, const Grid1D& grid,
                                  int count) {
    require(count >= 1 && count <= 20, "too-many-states",
            "eigensolver serves between 1 and 20 states, got " + std::to_string(count));
    const int m = grid.n - 2;
    require(m >= count + 2, "too-few-points", "grid too small for the requested state count");

    const double h = grid.h;
    const double off = -1.0 / (h * h);
    std::vector<double> diag(m);
    for (int i = 0; i < m; ++i) diag[i] = 2.0 / (h * h) + V(grid.point(i + 1));

    double lo = diag[0], hi = diag[0];
    for (double d : diag) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    lo -= 2.0 * std::abs(off) + 1.0;
    hi += 2.0 * std::abs(off) + 1.0;

    EigenResult res;
    res.grid = grid;

    for (int k = 0; k < count; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-13 * (std::abs(a) + std::abs(b)) + 1e-12; ++it) {
            const double mid = 0.5 * (a + b);
            (sturm_count(diag, off, mid) >= k + 1 ? b : a) = mid;
        }
        const double lam = 0.5 * (a + b);

        // inverse iteration from a deterministic seed, tiny shift for safety
        std::vector<double> v(m);
        for (int i = 0; i < m; ++i) v[i] = 1.0 + 0.3 * std::sin(7.3 * (i + 1));
        const double shift = lam + 1e-10 * (std::abs(lam) + 1.0);
        for (int sweep = 0; sweep < 4; ++sweep) {
            shifted_solve(diag, off, shift, v);
            double nrm = 0;
            for (double t : v) nrm += t * t;
            nrm = std::sqrt(nrm);
            for (double& t : v) t /= nrm;
        }
        // orthogonalize inside near-degenerate clusters (plain discrete dot)
        for (int p = 0; p < k; ++p) {
            if (std::abs(res.energies[p] - lam) > 1e-6 * (std::abs(lam) + 1.0)) continue;
            double dot = 0, pp = 0;
            for (int i = 0; i < m; ++i) {
                const double phi = res.states[p].values[i + 1].real();
                dot += phi * v[i];
                pp += phi * phi;
            }
            for (int i = 0; i < m; ++i) v[i] -= dot / pp * res.states[p].values[i + 1].real();
        }

        ComplexField state(grid);
        for (int i = 0; i < m; ++i) state.values[i + 1] = cplx(v[i], 0.0);
        const double nrm = l2_norm(state);
        for (auto& z : state.values) z /= nrm;
        // fix the overall sign: first sizable component positive
        for (const auto& z : state.values) {
            if (std::abs(z.real()) > 1e-8) {
                if (z.real() < 0)
                    for (auto& w : state.values) w = -w;
                break;
            }
        }
        res.energies.push_back(lam);
        res.states.push_back(std::move(state));
    }
    return res;
}

EigenResult oscillator_eigenpairs(const Grid1D& grid, int branch, int count) {
    require(branch == 1 || branch == 2, "invalid-kind", "branch must be 1 or 2");
    require(count >= 1 && count <= 20, "too-many-states",
            "eigensolver serves between 1 and 20 states, got " + std::to_string(count));
    EigenResult res;
    res.grid = grid;
    const double pi = 3.14159265358979323846;
    for (int n = 0; n < count; ++n) {
        res.energies.push_back(2.0 * n + (branch == 1 ? 2.0 : 0.0));
        ComplexField st(grid);
        // normalized Hermite function via the stable three-term recurrence on
        // hb_n = H_n(y) e^{-y^2/2} / sqrt(2^n n! sqrt(pi))
        for (int i = 0; i < grid.n; ++i) {
            const double y = grid.point(i);
            double prev = 0.0;
            double cur = std::pow(pi, -0.25) * std::exp(-y * y / 2);
            for (int j = 0; j < n; ++j) {
                const double next =
                    std::sqrt(2.0 / (j + 1)) * y * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
                prev = cur;
                cur = next;
            }
            st.values[i] = cplx(cur, 0.0);
        }
        res.states.push_back(std::move(st));
    }
    return res;
}

} // namespace itw
