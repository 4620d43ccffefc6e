#pragma once

#include "covhom/core.hpp"

#include <functional>

namespace covhom::opt {

/// Objective returning f(x) and writing the gradient into `grad`.
using GradientObjective = std::function<double(const Vec& x, Vec& grad)>;

struct LbfgsOptions {
    int max_iterations = 2000;
    int memory = 10;
    double gradient_tolerance = 1e-9;
    double value_tolerance = 1e-15;
};

struct LbfgsResult {
    Vec x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Limited-memory BFGS with Armijo backtracking.
LbfgsResult lbfgs(const GradientObjective& objective, Vec x0, const LbfgsOptions& options = {});

/// Golden-section search for a unimodal function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                      double* best_value = nullptr);

/// Solves g(x) = target for g strictly decreasing on (lo, +inf) by bracket growth and bisection.
double solve_decreasing(const std::function<double(double)>& g, double target, double lo, double tolerance);

struct ZoomOptions {
    int points_per_axis = 9;
    double cells = 2.0;  ///< next-level half-width in units of the current spacing
    double tolerance = 1e-10;
    int max_levels = 60;
};

/// Coarse grid followed by repeated local re-gridding around the incumbent.
/// Works for nonsmooth convex objectives in low dimension.
Vec zoom_minimize(const std::function<double(const Vec&)>& f, const Vec& center, double radius,
                  const ZoomOptions& options, double* best_value = nullptr);

}  // namespace covhom::opt
