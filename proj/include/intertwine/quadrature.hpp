#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "intertwine/field.hpp"

namespace itw {

// Composite Simpson requires an odd point count; with an even count the last
// interval falls back to trapezoid and a warning is logged (once per process
// unless reset). Warnings go to stderr so machine-readable output stays clean.
void log_warning(const std::string& msg);

// <f, g> = integral of conj(f) * g over the grid, conjugate-linear in the
// first argument.
cplx inner_product(const ComplexField& f, const ComplexField& g);

double l2_norm(const ComplexField& f);

// Simpson over the index window [lo, hi] (trapezoid patch on an even count,
// without the warning: interior windows are an implementation detail).
cplx integrate_window(const ComplexField& f, int lo, int hi);
double l2_norm_interior(const ComplexField& f, int band);

// Simpson of a scalar function with a fixed panel budget.
double integrate_function(const std::function<double(double)>& f, double a, double b,
                          int min_panels = 64);

// Cached cumulative integral from a fixed origin; queries are composite
// Simpson between sorted cache neighbours, so repeated evaluation over a time
// grid costs one pass. Queries are serialized: potentials captured into
// parallel residual sweeps may share one instance.
class CumulativeIntegral {
public:
    CumulativeIntegral(std::function<double(double)> f, double origin, double resolution_hint = 1e-3);
    double to(double x) const;

private:
    std::function<double(double)> f_;
    double origin_;
    double hint_;
    mutable std::map<double, double> cache_;
    mutable std::mutex mu_;
};

} // namespace itw
