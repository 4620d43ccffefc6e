#include "covhom/model.hpp"

#include "covhom/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace covhom {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Visits every point of the uniform m^n mesh on [0,1)^n.
template <class F>
void for_each_mesh_point(int n, int m, F&& f) {
    std::vector<int> idx(n, 0);
    Vec x(n);
    while (true) {
        for (int d = 0; d < n; ++d) x[d] = static_cast<double>(idx[d]) / m;
        f(x);
        int d = 0;
        while (d < n && ++idx[d] == m) idx[d++] = 0;
        if (d == n) break;
    }
}
}  // namespace

TrigPolynomial::TrigPolynomial(int dimension, std::vector<TrigTerm> terms)
    : dimension_(dimension), terms_(std::move(terms)) {
    if (dimension < 1 || dimension > 2) throw ModelError("trig polynomial dimension must be 1 or 2");
    for (const auto& t : terms_) {
        if (t.frequency.size() != dimension)
            throw ModelError("trig term frequency has wrong dimension");
        if (!std::isfinite(t.cos_coef) || !std::isfinite(t.sin_coef))
            throw ModelError("trig term coefficient is not finite");
    }
}

TrigPolynomial TrigPolynomial::constant(int dimension, double value) {
    TrigTerm t{IntVec::Zero(dimension), value, 0.0};
    return TrigPolynomial(dimension, {t});
}

double TrigPolynomial::value(const Vec& x) const {
    double v = 0.0;
    for (const auto& t : terms_) {
        const double phase = kTwoPi * t.frequency.cast<double>().dot(x);
        v += t.cos_coef * std::cos(phase) + t.sin_coef * std::sin(phase);
    }
    return v;
}

Vec TrigPolynomial::gradient(const Vec& x) const {
    Vec g = Vec::Zero(dimension_);
    for (const auto& t : terms_) {
        const Vec k = t.frequency.cast<double>();
        const double phase = kTwoPi * k.dot(x);
        g += kTwoPi * (-t.cos_coef * std::sin(phase) + t.sin_coef * std::cos(phase)) * k;
    }
    return g;
}

bool TrigPolynomial::is_constant() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const TrigTerm& t) {
        return t.frequency.isZero() || (t.cos_coef == 0.0 && t.sin_coef == 0.0);
    });
}

double TrigPolynomial::derivative_bound(int order) const {
    double b = 0.0;
    for (const auto& t : terms_) {
        const double k = kTwoPi * t.frequency.cast<double>().norm();
        b += (std::abs(t.cos_coef) + std::abs(t.sin_coef)) * std::pow(k, order);
    }
    return b;
}

TorusHamiltonian::TorusHamiltonian(int dimension, std::vector<TrigPolynomial> kinetic, TrigPolynomial potential)
    : n_(dimension), kinetic_(std::move(kinetic)), potential_(std::move(potential)) {
    if (n_ < 1 || n_ > 2) throw ModelError("torus dimension must be 1 or 2");
    if (static_cast<int>(kinetic_.size()) != n_ * n_)
        throw ModelError("kinetic matrix must have dimension^2 entries");
    for (const auto& p : kinetic_)
        if (p.dimension() != n_) throw ModelError("kinetic entry has wrong dimension");
    if (potential_.dimension() != n_) throw ModelError("potential has wrong dimension");
    compute_bounds();
}

TorusHamiltonian TorusHamiltonian::mechanical(int dimension, TrigPolynomial potential) {
    std::vector<TrigPolynomial> a;
    for (int i = 0; i < dimension; ++i)
        for (int j = 0; j < dimension; ++j) a.push_back(TrigPolynomial::constant(dimension, i == j ? 1.0 : 0.0));
    return TorusHamiltonian(dimension, std::move(a), std::move(potential));
}

Mat TorusHamiltonian::kinetic(const Vec& x) const {
    Mat a(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a(i, j) = kinetic_[i * n_ + j].value(x);
    return a;
}

Mat TorusHamiltonian::kinetic_derivative(const Vec& x, int coordinate) const {
    Mat a(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a(i, j) = kinetic_[i * n_ + j].gradient(x)[coordinate];
    return a;
}

double TorusHamiltonian::value(const Vec& x, const Vec& p) const {
    return 0.5 * p.dot(kinetic(x) * p) + potential(x);
}

double TorusHamiltonian::lagrangian(const Vec& x, const Vec& v, double kappa) const {
    const Mat a = kinetic(x);
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) throw ModelError("kinetic matrix is not positive definite");
    return 0.5 * kappa * v.dot(llt.solve(v)) - potential(x);
}

bool TorusHamiltonian::lagrangian_with_gradients(const Vec& x, const Vec& v, double kappa, double& value,
                                                 Vec& grad_x, Vec& grad_v) const {
    const Mat a = kinetic(x);
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) return false;
    const Vec w = llt.solve(v);  // A^{-1} v
    value = 0.5 * kappa * v.dot(w) - potential(x);
    grad_v = kappa * w;
    grad_x = -potential_gradient(x);
    if (!is_position_independent()) {
        for (int j = 0; j < n_; ++j) grad_x[j] -= 0.5 * kappa * w.dot(kinetic_derivative(x, j) * w);
    }
    return true;
}

bool TorusHamiltonian::is_position_independent() const {
    return potential_.is_constant() &&
           std::all_of(kinetic_.begin(), kinetic_.end(), [](const TrigPolynomial& p) { return p.is_constant(); });
}

void TorusHamiltonian::compute_bounds() {
    constexpr int m = 64;
    const double r = std::sqrt(static_cast<double>(n_)) / (2.0 * m);
    const double d2 = potential_.derivative_bound(2);
    double entry_lip2 = 0.0;
    for (const auto& p : kinetic_) entry_lip2 += std::pow(p.derivative_bound(1), 2);
    const double kinetic_slack = r * std::sqrt(entry_lip2);

    double min_eig = std::numeric_limits<double>::infinity();
    double max_eig = -std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity(), vmin = std::numeric_limits<double>::infinity();
    double vmax_cert = vmax, vmin_cert = vmin;
    for_each_mesh_point(n_, m, [&](const Vec& x) {
        Eigen::SelfAdjointEigenSolver<Mat> es(kinetic(x), Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
        const double v = potential(x);
        const double slope = potential_gradient(x).norm() * r + 0.5 * d2 * r * r;
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
        vmax_cert = std::max(vmax_cert, v + slope);
        vmin_cert = std::min(vmin_cert, v - slope);
    });
    bounds_.kinetic_min_eig = min_eig;
    bounds_.kinetic_max_eig = max_eig + kinetic_slack;
    bounds_.potential_sampled_max = vmax;
    bounds_.potential_sampled_min = vmin;
    bounds_.potential_max = potential_.is_constant() ? vmax : vmax_cert;
    bounds_.potential_min = potential_.is_constant() ? vmin : vmin_cert;
    if (!potential_.is_constant()) {
        const double tol = 1e-12 * std::max(1.0, std::abs(vmax));
        for_each_mesh_point(n_, m, [&](const Vec& x) {
            if (potential(x) >= vmax - tol) bounds_.wells.push_back(x);
        });
    }
}

double legendre_transform(const TorusHamiltonian& h, const Vec& x, const Vec& v) {
    if (v.size() != h.dimension()) throw ModelError("velocity has wrong dimension");
    if (!v.allFinite()) throw ModelError("velocity is not finite");
    return h.lagrangian(x, v);
}

double legendre_numeric(const std::function<double(const Vec&)>& hamiltonian, const Vec& v, Vec* maximizer) {
    constexpr double step = 1e-5;
    const auto n = v.size();
    auto objective = [&](const Vec& p, Vec& g) {
        Vec q = p;
        for (Eigen::Index i = 0; i < n; ++i) {
            q[i] = p[i] + step;
            const double fp = hamiltonian(q);
            q[i] = p[i] - step;
            const double fm = hamiltonian(q);
            q[i] = p[i];
            g[i] = (fp - fm) / (2 * step) - v[i];
        }
        return hamiltonian(p) - p.dot(v);
    };
    opt::LbfgsOptions o;
    o.gradient_tolerance = 1e-10;
    o.value_tolerance = 0.0;
    auto res = opt::lbfgs(objective, v, o);
    if (maximizer) *maximizer = res.x;
    return -res.value;
}

TonelliReport verify_tonelli(const TorusHamiltonian& h, int grid_resolution, double eigen_tolerance) {
    if (grid_resolution < 8) throw ModelError("verify_tonelli: grid resolution must be at least 8");
    const int n = h.dimension();
    TonelliReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    rep.superlinearity_ratio = std::numeric_limits<double>::infinity();
    std::vector<Vec> directions;
    if (n == 1) {
        directions = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    } else {
        for (int k = 0; k < 8; ++k) {
            const double th = kTwoPi * k / 8.0;
            directions.push_back((Vec(2) << std::cos(th), std::sin(th)).finished());
        }
    }
    std::vector<Vec> shifts;
    for (int d = 0; d < n; ++d) {
        Vec z = Vec::Zero(n);
        z[d] = 1.0;
        shifts.push_back(z);
        shifts.push_back(-3.0 * z);
    }
    for_each_mesh_point(n, grid_resolution, [&](const Vec& x) {
        Eigen::SelfAdjointEigenSolver<Mat> es(h.kinetic(x), Eigen::EigenvaluesOnly);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
        for (const auto& dir : directions) {
            const Vec p = rep.probe_radius * dir;
            const double hv = h.value(x, p);
            rep.superlinearity_ratio = std::min(rep.superlinearity_ratio, hv / rep.probe_radius);
            for (const auto& z : shifts)
                rep.periodicity_residual = std::max(rep.periodicity_residual, std::abs(h.value(x + z, dir) - h.value(x, dir)));
        }
    });
    rep.superlinear = rep.superlinearity_ratio > rep.probe_slope;
    rep.pass = rep.min_eigenvalue > eigen_tolerance;
    return rep;
}

GraphLagrangian::GraphLagrangian(std::vector<double> potentials) : potentials_(std::move(potentials)) {
    for (double v : potentials_)
        if (!std::isfinite(v)) throw ModelError("edge potential is not finite");
}

double GraphLagrangian::min_potential() const {
    return potentials_.empty() ? 0.0 : *std::min_element(potentials_.begin(), potentials_.end());
}

double GraphLagrangian::max_potential() const {
    return potentials_.empty() ? 0.0 : *std::max_element(potentials_.begin(), potentials_.end());
}

}  // namespace covhom
