#include "intertwine/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <iostream>

namespace itw {

namespace {
std::atomic<bool> warned_even_count{false};
}

void log_warning(const std::string& msg) {
    if (!warned_even_count.exchange(true)) std::cerr << "warning: " << msg << "\n";
}

namespace {

// Simpson weights over [lo, hi]; even interval counts get a trapezoid patch
// on the final interval.
template <typename Acc, typename Get>
Acc simpson_indexed(int lo, int hi, double h, Get value, bool* even_fallback) {
    const int m = hi - lo; // number of intervals
    Acc acc{};
    if (m <= 0) return acc;
    if (m == 1) {
        if (even_fallback) *even_fallback = true;
        return (h / 2.0) * (value(lo) + value(hi));
    }
    int last = hi;
    if (m % 2 != 0) { // odd interval count: trapezoid on the last interval
        if (even_fallback) *even_fallback = true;
        last = hi - 1;
    }
    Acc s = value(lo) + value(last);
    for (int i = lo + 1; i < last; i += 2) s += 4.0 * value(i);
    for (int i = lo + 2; i < last; i += 2) s += 2.0 * value(i);
    acc = (h / 3.0) * s;
    if (last != hi) acc += (h / 2.0) * (value(hi - 1) + value(hi));
    return acc;
}

} // namespace

cplx inner_product(const ComplexField& f, const ComplexField& g) {
    check_same_grid(f, g);
    bool fb = false;
    cplx r = simpson_indexed<cplx>(
        0, f.grid.n - 1, f.grid.h,
        [&](int i) { return std::conj(f.values[i]) * g.values[i]; }, &fb);
    if (fb)
        log_warning("inner_product: even point count, trapezoid fallback on the last interval");
    return r;
}

double l2_norm(const ComplexField& f) {
    bool fb = false;
    double r = simpson_indexed<double>(
        0, f.grid.n - 1, f.grid.h, [&](int i) { return std::norm(f.values[i]); }, &fb);
    if (fb)
        log_warning("inner_product: even point count, trapezoid fallback on the last interval");
    return std::sqrt(std::max(0.0, r));
}

cplx integrate_window(const ComplexField& f, int lo, int hi) {
    require(lo >= 0 && hi < f.grid.n && lo < hi, "invalid-extent",
            "integration window outside the grid");
    return simpson_indexed<cplx>(lo, hi, f.grid.h, [&](int i) { return f.values[i]; }, nullptr);
}

double l2_norm_interior(const ComplexField& f, int band) {
    const int lo = band, hi = f.grid.n - 1 - band;
    require(lo < hi, "invalid-extent", "unreliable band swallows the whole grid");
    double r = simpson_indexed<double>(
        lo, hi, f.grid.h, [&](int i) { return std::norm(f.values[i]); }, nullptr);
    return std::sqrt(std::max(0.0, r));
}

double integrate_function(const std::function<double(double)>& f, double a, double b,
                          int min_panels) {
    if (a == b) return 0.0;
    int panels = std::max(2, min_panels);
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; i += 2) s += 4.0 * f(a + i * h);
    for (int i = 2; i < panels; i += 2) s += 2.0 * f(a + i * h);
    return s * h / 3.0;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, double origin,
                                       double resolution_hint)
    : f_(std::move(f)), origin_(origin), hint_(std::max(resolution_hint, 1e-12)) {
    cache_[origin_] = 0.0;
}

double CumulativeIntegral::to(double x) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    // integrate from the nearest cached point
    auto up = cache_.upper_bound(x);
    double x0, v0;
    if (up == cache_.begin()) {
        x0 = up->first;
        v0 = up->second;
    } else {
        auto down = std::prev(up);
        if (up == cache_.end() || x - down->first <= up->first - x) {
            x0 = down->first;
            v0 = down->second;
        } else {
            x0 = up->first;
            v0 = up->second;
        }
    }
    const double len = std::abs(x - x0);
    int panels = len == 0.0 ? 0 : static_cast<int>(std::ceil(len / hint_)) * 2;
    panels = std::min(std::max(panels, 16), 200000);
    const double v = v0 + integrate_function(f_, x0, x, panels);
    cache_[x] = v;
    return v;
}

} // namespace itw
