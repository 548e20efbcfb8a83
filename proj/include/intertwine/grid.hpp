#pragma once

#include <cmath>
#include <string>

#include "intertwine/errors.hpp"

namespace itw {

// Uniform spatial grid. Point i is exactly x_min + i*h; h is computed once
// from the extent so accumulated rounding cannot shift interior nodes.
struct Grid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;      // number of points, >= 9
    double h = 0.0; // spacing (x_max - x_min)/(n - 1)

    double point(int i) const { return x_min + i * h; }

    bool operator==(const Grid1D& o) const {
        return x_min == o.x_min && x_max == o.x_max && n == o.n;
    }
    bool operator!=(const Grid1D& o) const { return !(*this == o); }
};

inline Grid1D make_grid(double x_min, double x_max, int n) {
    require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
            "invalid-extent",
            "grid extent [" + std::to_string(x_min) + ", " + std::to_string(x_max) +
                "] is not a finite increasing interval");
    require(n >= 9, "too-few-points",
            "grid needs at least 9 points, got " + std::to_string(n));
    Grid1D g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n = n;
    g.h = (x_max - x_min) / (n - 1);
    return g;
}

// Half-line grids (used by the singular x^2-type families) must stay clear of
// the origin by a safety margin of ten spacings.
inline void require_halfline(const Grid1D& g) {
    require(g.x_min > 0.0 && g.x_min >= 10.0 * g.h, "invalid-extent",
            "half-line grid must start at x_min > 0 with x_min >= 10h");
}

// Uniform time sampling for snapshot sequences.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int steps = 0; // number of steps; snapshots = steps + 1

    double time(int k) const { return t0 + k * dt; }
    int snapshots() const { return steps + 1; }
};

inline TimeGrid make_time_grid(double t0, double dt, int steps) {
    require(std::isfinite(t0) && std::isfinite(dt) && dt > 0.0, "invalid-extent",
            "time step must be finite and positive");
    require(steps >= 1, "too-few-points", "time grid needs at least one step");
    TimeGrid tg;
    tg.t0 = t0;
    tg.dt = dt;
    tg.steps = steps;
    return tg;
}

} // namespace itw
