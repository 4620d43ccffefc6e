#include "covhom/optimize.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace covhom::opt {

LbfgsResult lbfgs(const GradientObjective& objective, Vec x, const LbfgsOptions& options) {
    const auto n = x.size();
    Vec g(n);
    double f = objective(x, g);
    std::deque<Vec> s_hist, y_hist;
    std::deque<double> rho_hist;
    LbfgsResult result;
    Vec x_new(n), g_new(n);

    for (int it = 0; it < options.max_iterations; ++it) {
        result.iterations = it;
        if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        // two-loop recursion
        Vec q = g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        } else {
            q /= std::max(1.0, g.norm());
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += s_hist[i] * (alpha[i] - beta);
        }
        Vec direction = -q;
        double slope = g.dot(direction);
        if (!(slope < 0.0)) {
            direction = -g;
            slope = -g.squaredNorm();
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        double step = 1.0;
        double f_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * direction;
            f_new = objective(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            result.converged = true;  // no further decrease available at working precision
            break;
        }
        const Vec s = x_new - x;
        const Vec y = g_new - g;
        const double sy = s.dot(y);
        const double improvement = f - f_new;
        x = x_new;
        g = g_new;
        f = f_new;
        if (sy > 1e-16 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > options.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        if (improvement <= options.value_tolerance * std::max(1.0, std::abs(f))) {
            result.converged = true;
            break;
        }
    }
    result.x = std::move(x);
    result.value = f;
    return result;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                      double* best_value) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tolerance) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double x = fc <= fd ? c : d;
    double fx = std::min(fc, fd);
    // endpoints can win for monotone functions
    const double fa = f(lo), fb = f(hi);
    if (fa < fx) {
        x = lo;
        fx = fa;
    }
    if (fb < fx) {
        x = hi;
        fx = fb;
    }
    if (best_value) *best_value = fx;
    return x;
}

double solve_decreasing(const std::function<double(double)>& g, double target, double lo, double tolerance) {
    double width = 1.0;
    double hi = lo + width;
    int grow = 0;
    while (g(hi) > target) {
        lo = hi;
        width *= 2.0;
        hi = lo + width;
        if (++grow > 200) throw SolverError("solve_decreasing: failed to bracket root");
    }
    while (hi - lo > tolerance * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Vec zoom_minimize(const std::function<double(const Vec&)>& f, const Vec& center, double radius,
                  const ZoomOptions& options, double* best_value) {
    const auto dim = center.size();
    Vec best = center;
    double best_f = f(center);
    const int m = std::max(3, options.points_per_axis);
    if (!(2.0 * options.cells < m - 1))
        throw std::invalid_argument("zoom_minimize: cells must be below (points_per_axis - 1) / 2");
    std::vector<int> idx(dim);
    for (int level = 0; level < options.max_levels && radius > options.tolerance; ++level) {
        const double spacing = 2.0 * radius / (m - 1);
        const Vec origin = best;
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            Vec p(dim);
            for (Eigen::Index d = 0; d < dim; ++d) p[d] = origin[d] - radius + spacing * idx[d];
            const double v = f(p);
            if (v < best_f) {
                best_f = v;
                best = p;
            }
            Eigen::Index d = 0;
            while (d < dim && ++idx[d] == m) idx[d++] = 0;
            if (d == dim) break;
        }
        radius = options.cells * spacing;
    }
    if (best_value) *best_value = best_f;
    return best;
}

}  // namespace covhom::opt
