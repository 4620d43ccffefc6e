#include "covhom/action.hpp"

#include "covhom/optimize.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

namespace covhom {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_time(double t, const char* what) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument(std::string(what) + ": time must be positive");
}

double operator_norm(const Mat& m, Norm n) {
    switch (n) {
        case Norm::L1: return m.cwiseAbs().colwise().sum().maxCoeff();
        case Norm::LInf: return m.cwiseAbs().rowwise().sum().maxCoeff();
        case Norm::L2: {
            Eigen::JacobiSVD<Mat> svd(m);
            return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
        }
    }
    return 0.0;
}

double spectral_norm(const Mat& m) { return operator_norm(m, Norm::L2); }
}  // namespace

// ---------------------------------------------------------------------------

DatumFamily parse_datum_family(const std::string& name) {
    if (name == "affine") return DatumFamily::Affine;
    if (name == "cone") return DatumFamily::Cone;
    if (name == "quadratic") return DatumFamily::Quadratic;
    throw ConfigError("datum.family", "unknown datum family '" + name + "' (expected affine, cone or quadratic)");
}

std::string to_string(DatumFamily f) {
    switch (f) {
        case DatumFamily::Affine: return "affine";
        case DatumFamily::Cone: return "cone";
        case DatumFamily::Quadratic: return "quadratic";
    }
    return "affine";
}

InitialDatum InitialDatum::affine(double a, Vec P) {
    InitialDatum d;
    d.family = DatumFamily::Affine;
    d.a = a;
    d.P = std::move(P);
    d.validate();
    return d;
}

InitialDatum InitialDatum::cone(double c, Norm n, int dimension) {
    InitialDatum d;
    d.family = DatumFamily::Cone;
    d.c = c;
    d.norm = n;
    d.cone_dimension = dimension;
    d.validate();
    return d;
}

InitialDatum InitialDatum::quadratic(double a, Vec b, Mat Q) {
    InitialDatum d;
    d.family = DatumFamily::Quadratic;
    d.a = a;
    d.b = std::move(b);
    d.Q = std::move(Q);
    d.validate();
    return d;
}

int InitialDatum::base_dimension() const {
    switch (family) {
        case DatumFamily::Affine: return static_cast<int>(P.size());
        case DatumFamily::Cone: return cone_dimension;
        case DatumFamily::Quadratic: return static_cast<int>(b.size());
    }
    return 0;
}

int InitialDatum::dimension() const { return pullback ? static_cast<int>(pullback->cols()) : base_dimension(); }

void InitialDatum::validate() const {
    if (!std::isfinite(a) || !std::isfinite(c) || !std::isfinite(perturbation))
        throw ModelError("datum coefficients must be finite");
    if (base_dimension() < 1) throw ModelError("datum has no dimension");
    switch (family) {
        case DatumFamily::Affine:
            if (!P.allFinite()) throw ModelError("affine slope must be finite");
            break;
        case DatumFamily::Cone: break;
        case DatumFamily::Quadratic: {
            if (Q.rows() != b.size() || Q.cols() != b.size()) throw ModelError("quadratic form has wrong shape");
            if (!Q.allFinite() || !b.allFinite()) throw ModelError("quadratic datum must be finite");
            if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ModelError("quadratic form must be symmetric");
            Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -1e-12)
                throw ModelError("quadratic form must be positive semidefinite for linear growth");
            break;
        }
    }
    if (pullback && pullback->rows() != base_dimension()) throw ModelError("datum pullback has wrong shape");
}

double InitialDatum::base_value(const Vec& q) const {
    switch (family) {
        case DatumFamily::Affine: return a + P.dot(q);
        case DatumFamily::Cone: return c * covhom::norm(q, norm);
        case DatumFamily::Quadratic: return a + b.dot(q) + 0.5 * q.dot(Q * q);
    }
    return 0.0;
}

double InitialDatum::base_lipschitz2() const {
    switch (family) {
        case DatumFamily::Affine: return P.norm();
        case DatumFamily::Cone: return std::abs(c) * norm_over_euclid(norm, cone_dimension);
        case DatumFamily::Quadratic: return kInf;
    }
    return kInf;
}

double InitialDatum::limit(const Vec& h) const {
    if (h.size() != dimension()) throw ModelError("datum argument has wrong dimension");
    return pullback ? base_value(*pullback * h) : base_value(h);
}

double InitialDatum::lower_bound(const Vec& center, double radius) const {
    const Vec q = pullback ? Vec(*pullback * center) : center;
    const double rq = pullback ? spectral_norm(*pullback) * radius : radius;
    if (family == DatumFamily::Quadratic) return base_value(q) - (b + Q * q).norm() * rq;
    return base_value(q) - base_lipschitz2() * rq;
}

double InitialDatum::upper_bound(const Vec& center, double radius) const {
    const Vec q = pullback ? Vec(*pullback * center) : center;
    const double rq = pullback ? spectral_norm(*pullback) * radius : radius;
    if (family == DatumFamily::Quadratic) {
        Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
        return base_value(q) + (b + Q * q).norm() * rq + 0.5 * es.eigenvalues().maxCoeff() * rq * rq;
    }
    return base_value(q) + base_lipschitz2() * rq;
}

double InitialDatum::growth_slope() const {
    const Mat m = pullback ? *pullback : Mat::Identity(base_dimension(), base_dimension());
    switch (family) {
        case DatumFamily::Affine: return dual_norm(m.transpose() * P, norm);
        case DatumFamily::Cone: return c >= 0.0 ? 0.0 : std::abs(c) * operator_norm(m, norm);
        case DatumFamily::Quadratic: return dual_norm(m.transpose() * b, norm);
    }
    return 0.0;
}

double InitialDatum::growth_offset() const {
    if (family == DatumFamily::Cone) return 0.0;
    return std::max(0.0, -a);
}

double InitialDatum::cover_value(const Vec& x, double eps) const {
    double v = limit(eps * x);
    if (perturbation != 0.0) v += eps * perturbation * std::cos(kTwoPi * x[0]);
    return v;
}

double InitialDatum::cover_value(const GraphCover& cover, const GraphPoint& x, double eps) const {
    const GraphPoint p = cover.normalize(x);
    double v = limit(eps * cover.g_map(p));
    if (perturbation != 0.0) {
        const double bump = p.on_vertex() ? 1.0 : std::cos(kTwoPi * p.s / cover.graph().edge(p.edge).length);
        v += eps * perturbation * bump;
    }
    return v;
}

InitialDatum InitialDatum::composed(const Mat& m) const {
    if (m.rows() != dimension()) throw ModelError("composition map has wrong shape");
    InitialDatum d = *this;
    d.pullback = pullback ? Mat(*pullback * m) : m;
    return d;
}

// ---------------------------------------------------------------------------

double allocation_multiplier(const double* lengths, const double* potentials, int count, double dwell, double T,
                             double kappa) {
    require_positive_time(T, "allocate_time");
    int active = 0, last = -1;
    double vmin_active = kInf;
    for (int i = 0; i < count; ++i)
        if (lengths[i] > 0.0) {
            ++active;
            last = i;
            vmin_active = std::min(vmin_active, potentials[i]);
        }
    if (dwell > vmin_active) throw std::invalid_argument("allocate_time: dwell potential exceeds a travelled piece");
    const double lo = -dwell;
    if (active == 0) return lo;
    if (active == 1) {
        const double L = lengths[last];
        return std::max(lo, kappa * L * L / (2.0 * T * T) - potentials[last]);
    }
    const double sk = std::sqrt(kappa);
    auto S = [&](double lam) {
        double s = 0.0;
        for (int i = 0; i < count; ++i)
            if (lengths[i] > 0.0) s += lengths[i] * sk / std::sqrt(2.0 * (potentials[i] + lam));
        return s;
    };
    if (dwell < vmin_active && S(lo) <= T) return lo;
    return opt::solve_decreasing(S, T, std::max(lo, -vmin_active), 1e-14);
}

double allocate_time(const double* lengths, const double* potentials, int count, double dwell, double T,
                     double kappa) {
    const double lam = allocation_multiplier(lengths, potentials, count, dwell, T, kappa);
    double value = -lam * T;
    for (int i = 0; i < count; ++i)
        if (lengths[i] > 0.0) value += lengths[i] * std::sqrt(2.0 * kappa * std::max(0.0, potentials[i] + lam));
    return value;
}

double allocate_time(const PathLabel& label, const EdgeClasses& classes, double T, double kappa) {
    double dwell = kInf;
    for (int c = 0; c < classes.count(); ++c)
        if (label.mask & (1u << c)) dwell = std::min(dwell, classes.potential[c]);
    if (!std::isfinite(dwell)) throw SolverError("path label touches no edge class");
    return allocate_time(label.length.data(), classes.potential.data(), classes.count(), dwell, T, kappa);
}

double minimal_action(const GraphCover& cover, const GraphLagrangian& L, const GraphPoint& y, const GraphPoint& x,
                      double T, double kappa) {
    require_positive_time(T, "minimal_action");
    const auto& g = cover.graph();
    const EdgeClasses classes = EdgeClasses::from_potentials(g, L.potentials());
    const double d0 = cover_distance(cover, y, x);
    const double upper = kappa * d0 * d0 / (2.0 * T) + L.max_potential() * T;
    const double cap = std::sqrt(std::max(0.0, 2.0 * T * (upper - L.min_potential() * T) / kappa));
    SearchOptions opt;
    opt.length_cap = cap * (1.0 + 1e-12) + 1e-12;
    CoverSearch search(cover, classes, y, opt);
    double best = kInf;
    for (const auto& lab : search.labels_to(x)) best = std::min(best, allocate_time(lab, classes, T, kappa));
    if (!std::isfinite(best)) throw SolverError("minimal_action: target not reached within the certified radius");
    return best;
}

// ---------------------------------------------------------------------------
// Piecewise-linear trajectories on R^n with uniform time steps.

namespace {

// Average of sum_k c cos(2 pi k.x) + s sin(2 pi k.x) along the segment [a, b], with gradients.
double segment_potential(const TrigPolynomial& V, const Vec& a, const Vec& b, Vec& ga, Vec& gb) {
    const Vec delta = b - a;
    double avg = 0.0;
    ga.setZero(a.size());
    gb.setZero(a.size());
    for (const auto& t : V.terms()) {
        const Vec k = t.frequency.cast<double>();
        const double phi = kTwoPi * k.dot(a);
        const double w = kTwoPi * k.dot(delta);
        double S, C, dS, dC;
        if (std::abs(w) < 1e-4) {
            const double w2 = w * w;
            S = 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
            C = w / 2.0 - w * w2 / 24.0 + w * w2 * w2 / 720.0;
            dS = -w / 3.0 + w * w2 / 30.0;
            dC = 0.5 - w2 / 8.0 + w2 * w2 / 144.0;
        } else {
            const double sw = std::sin(w), cw = std::cos(w);
            S = sw / w;
            C = (1.0 - cw) / w;
            dS = (w * cw - sw) / (w * w);
            dC = (w * sw - (1.0 - cw)) / (w * w);
        }
        const double sp = std::sin(phi), cp = std::cos(phi);
        avg += t.cos_coef * (cp * S - sp * C) + t.sin_coef * (sp * S + cp * C);
        const double dphi = t.cos_coef * (-sp * S - cp * C) + t.sin_coef * (cp * S - sp * C);
        const double dw = t.cos_coef * (cp * dS - sp * dC) + t.sin_coef * (sp * dS + cp * dC);
        ga += kTwoPi * (dphi - dw) * k;
        gb += kTwoPi * dw * k;
    }
    return avg;
}

// Discrete action of the path y = q_0, q_1, ..., q_N = x with N equal time steps.
class PathObjective {
public:
    PathObjective(const TorusHamiltonian& H, const Vec& y, const Vec& x, double T, double kappa, int segments)
        : H_(H), y_(y), x_(x), tau_(T / segments), kappa_(kappa), N_(segments), n_(H.dimension()) {
        constant_kinetic_ = std::all_of(H.kinetic_polys().begin(), H.kinetic_polys().end(),
                                        [](const TrigPolynomial& p) { return p.is_constant(); });
        if (constant_kinetic_) {
            Eigen::LLT<Mat> llt(H.kinetic(Vec::Zero(n_)));
            if (llt.info() != Eigen::Success) throw ModelError("kinetic matrix is not positive definite");
            inverse_ = llt.solve(Mat::Identity(n_, n_));
        }
    }

    int segments() const { return N_; }
    int size() const { return n_ * (N_ - 1); }

    Vec node(const Vec& z, int i) const {
        if (i == 0) return y_;
        if (i == N_) return x_;
        return z.segment(static_cast<Eigen::Index>(n_) * (i - 1), n_);
    }

    double value(const Vec& z) const {
        Vec g(size());
        return evaluate(z, g);
    }

    double evaluate(const Vec& z, Vec& grad) const {
        grad.setZero(size());
        double total = 0.0;
        Vec ga(n_), gb(n_);
        for (int i = 0; i < N_; ++i) {
            const double s = segment(node(z, i), node(z, i + 1), ga, gb);
            if (!std::isfinite(s)) return kInf;
            total += s;
            if (i > 0) grad.segment(static_cast<Eigen::Index>(n_) * (i - 1), n_) += ga;
            if (i + 1 < N_) grad.segment(static_cast<Eigen::Index>(n_) * i, n_) += gb;
        }
        return total;
    }

    // Block-tridiagonal Hessian by finite differences of the gradient, three node colours per coordinate.
    Eigen::SparseMatrix<double> hessian(const Vec& z, const Vec& g) const {
        const int m = size();
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(3 * n_ * m));
        const double h = 1e-6 * (1.0 + (z.size() ? z.cwiseAbs().maxCoeff() : 0.0));
        Vec gp(m);
        for (int colour = 0; colour < 3; ++colour)
            for (int d = 0; d < n_; ++d) {
                Vec zp = z;
                for (int i = 1 + colour; i < N_; i += 3) zp[n_ * (i - 1) + d] += h;
                evaluate(zp, gp);
                for (int j = 1; j < N_; ++j)
                    for (int i = std::max(1, j - 1); i <= std::min(N_ - 1, j + 1); ++i) {
                        if (i % 3 != (1 + colour) % 3) continue;
                        for (int r = 0; r < n_; ++r) {
                            const int row = n_ * (j - 1) + r, col = n_ * (i - 1) + d;
                            const double v = 0.5 * (gp[row] - g[row]) / h;
                            trips.emplace_back(row, col, v);
                            trips.emplace_back(col, row, v);
                        }
                    }
            }
        Eigen::SparseMatrix<double> H(m, m);
        H.setFromTriplets(trips.begin(), trips.end());
        return H;
    }

private:
    // Action of the straight segment a -> b traversed at constant speed in one time step.
    double segment(const Vec& a, const Vec& b, Vec& ga, Vec& gb) const {
        const Vec delta = b - a;
        const double tau = tau_;
        double kin;
        if (constant_kinetic_) {
            const Vec md = inverse_ * delta;
            kin = kappa_ * delta.dot(md) / (2.0 * tau);
            ga = -kappa_ * md / tau;
            gb = -ga;
        } else {
            static constexpr double w[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
            const Vec v = delta / tau;
            const Vec pts[3] = {a, 0.5 * (a + b), b};
            kin = 0.0;
            Vec gdelta = Vec::Zero(n_);
            Vec gx[3];
            for (int j = 0; j < 3; ++j) {
                Eigen::LLT<Mat> llt(H_.kinetic(pts[j]));
                if (llt.info() != Eigen::Success) return kInf;
                const Vec u = llt.solve(v);
                kin += tau * w[j] * 0.5 * kappa_ * v.dot(u);
                gdelta += w[j] * kappa_ * u;
                gx[j].resize(n_);
                for (int d = 0; d < n_; ++d)
                    gx[j][d] = -0.5 * kappa_ * u.dot(H_.kinetic_derivative(pts[j], d) * u) * tau * w[j];
            }
            ga = -gdelta + gx[0] + 0.5 * gx[1];
            gb = gdelta + gx[2] + 0.5 * gx[1];
        }
        Vec pa, pb;
        const double avg = segment_potential(H_.potential_poly(), a, b, pa, pb);
        ga -= tau * pa;
        gb -= tau * pb;
        return kin - tau * avg;
    }

    const TorusHamiltonian& H_;
    Vec y_, x_;
    double tau_, kappa_;
    int N_, n_;
    bool constant_kinetic_ = false;
    Mat inverse_;
};

// Damped Newton iteration on the node positions.
double newton_path(const PathObjective& obj, Vec& z, int max_iterations) {
    if (obj.size() == 0) return obj.value(z);
    Vec g(obj.size()), gn(obj.size());
    double f = obj.evaluate(z, g);
    if (!std::isfinite(f)) return kInf;
    double mu = 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    Eigen::SparseMatrix<double> eye(obj.size(), obj.size());
    eye.setIdentity();
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::SparseMatrix<double> H = obj.hessian(z, g);
        const double diag = std::max(1e-12, H.diagonal().cwiseAbs().maxCoeff());
        bool accepted = false;
        for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
            solver.compute(mu > 0.0 ? Eigen::SparseMatrix<double>(H + mu * eye) : H);
            bool ok = solver.info() == Eigen::Success && (solver.vectorD().array() > 0.0).all();
            Vec step;
            if (ok) {
                step = -solver.solve(g);
                ok = step.allFinite() && g.dot(step) < 0.0;
            }
            if (!ok) {
                mu = mu > 0.0 ? 10.0 * mu : 1e-8 * diag;
                continue;
            }
            const double predicted = -g.dot(step);
            if (predicted <= 1e-15 * (1.0 + std::abs(f))) return f;
            double a = 1.0;
            for (int ls = 0; ls < 30; ++ls, a *= 0.5) {
                Vec zn = z + a * step;
                const double fn = obj.evaluate(zn, gn);
                if (std::isfinite(fn) && fn <= f - 1e-4 * a * predicted) {
                    z = std::move(zn);
                    f = fn;
                    g.swap(gn);
                    accepted = true;
                    break;
                }
            }
            if (accepted)
                mu = a == 1.0 ? 0.1 * mu : mu;
            else
                mu = mu > 0.0 ? 10.0 * mu : 1e-8 * diag;
            if (mu < 1e-14 * diag) mu = 0.0;
        }
        if (!accepted) return f;
    }
    return f;
}

Vec pack_nodes(const std::function<Vec(double)>& path, int N) {
    const int n = static_cast<int>(path(0.0).size());
    Vec z(static_cast<Eigen::Index>(n) * (N - 1));
    for (int i = 1; i < N; ++i) z.segment(static_cast<Eigen::Index>(n) * (i - 1), n) = path(static_cast<double>(i) / N);
    return z;
}

Vec refine_nodes(const PathObjective& obj, const Vec& z) {
    const int N = obj.segments();
    return pack_nodes(
        [&](double s) {
            const double u = s * N;
            const int i = std::min(N - 1, static_cast<int>(std::floor(u)));
            return Vec(obj.node(z, i) + (u - i) * (obj.node(z, i + 1) - obj.node(z, i)));
        },
        2 * N);
}

}  // namespace

TrajectoryResult trajectory_action(const TorusHamiltonian& H, const Vec& y, const Vec& x, double T, double kappa,
                                   const TrajectoryOptions& options) {
    require_positive_time(T, "minimal_action");
    const int n = H.dimension();
    if (y.size() != n || x.size() != n) throw ModelError("trajectory endpoints have wrong dimension");
    TrajectoryResult out;
    if (H.is_position_independent()) {
        Eigen::LLT<Mat> llt(H.kinetic(Vec::Zero(n)));
        if (llt.info() != Eigen::Success) throw ModelError("kinetic matrix is not positive definite");
        const Vec d = x - y;
        out.action = kappa * d.dot(llt.solve(d)) / (2.0 * T) - H.potential(Vec::Zero(n)) * T;
        out.raw_action = out.action;
        out.segments = 1;
        out.converged = true;
        out.nodes = {y, x};
        return out;
    }

    int N = std::max(2, options.initial_segments);
    std::vector<std::function<Vec(double)>> starts = {[&](double s) { return Vec(y + s * (x - y)); }};
    std::vector<Vec> lifted;
    const auto& wells = H.bounds().wells;
    for (int i = 0; i < std::min<int>(options.max_wells, static_cast<int>(wells.size())); ++i)
        for (const Vec& anchor : {y, x, Vec(0.5 * (x + y))}) {
            const Vec w = wells[i] + (anchor - wells[i]).array().round().matrix();
            if (std::none_of(lifted.begin(), lifted.end(), [&](const Vec& o) { return (o - w).norm() < 1e-12; }))
                lifted.push_back(w);
        }
    for (const Vec& w : lifted) {
        const double d1 = (w - y).norm(), d3 = (x - w).norm();
        const double travel = std::min(0.5 * T, d1 + d3 + 0.5);
        const double share = d1 + d3 > 0.0 ? d1 / (d1 + d3) : 0.5;
        const double t1 = travel * share / T, t3 = travel * (1.0 - share) / T;
        starts.push_back([=](double s) {
            if (s < t1) return Vec(y + (s / t1) * (w - y));
            if (s > 1.0 - t3) return Vec(w + ((s - (1.0 - t3)) / t3) * (x - w));
            return w;
        });
    }

    Vec best_z;
    double best = kInf;
    {
        PathObjective obj(H, y, x, T, kappa, N);
        for (const auto& path : starts) {
            Vec z = pack_nodes(path, N);
            const double v = newton_path(obj, z, options.max_iterations);
            if (v < best) {
                best = v;
                best_z = std::move(z);
            }
        }
    }
    if (!std::isfinite(best)) throw SolverError("trajectory optimization failed to find a finite action");

    double extrapolated = best, previous_extrapolated = kInf;
    while (2 * N <= options.max_segments) {
        const PathObjective coarse(H, y, x, T, kappa, N);
        Vec z = refine_nodes(coarse, best_z);
        N *= 2;
        const PathObjective fine(H, y, x, T, kappa, N);
        const double v = newton_path(fine, z, options.max_iterations);
        if (!std::isfinite(v)) throw SolverError("trajectory refinement produced a non-finite action");
        previous_extrapolated = extrapolated;
        extrapolated = v + (v - best) / 3.0;
        best = v;
        best_z = std::move(z);
        if (std::abs(extrapolated - previous_extrapolated) < options.tolerance * T && N >= 4 * options.initial_segments) {
            out.converged = true;
            break;
        }
    }
    const PathObjective obj(H, y, x, T, kappa, N);
    out.action = extrapolated;
    out.raw_action = best;
    out.segments = N;
    for (int i = 0; i <= N; ++i) out.nodes.push_back(obj.node(best_z, i));
    return out;
}

double minimal_action(const TorusHamiltonian& H, const Vec& y, const Vec& x, double T, double kappa,
                      const TrajectoryOptions& options) {
    return trajectory_action(H, y, x, T, kappa, options).action;
}

// ---------------------------------------------------------------------------

GrowthBounds lagrangian_growth(const TorusHamiltonian& H, double kappa) {
    const auto& b = H.bounds();
    return {kappa / (2.0 * b.kinetic_max_eig), b.potential_max, -b.potential_min};
}

GrowthBounds lagrangian_growth(const GraphLagrangian& L, double kappa) {
    return {0.5 * kappa, -L.min_potential(), L.max_potential()};
}

double search_radius(const InitialDatum& datum, double lipschitz, const GrowthBounds& growth, double eps,
                     const CompactSet& set, double t_max) {
    if (!(eps > 0.0)) throw std::invalid_argument("search_radius: epsilon must be positive");
    require_positive_time(t_max, "search_radius");
    const double A = datum.growth_slope(), B = datum.growth_offset();
    const double M = lipschitz * A + 1.0;
    const double N = M * M / (4.0 * growth.quadratic) + growth.offset;
    const double sup_f = datum.upper_bound(set.center, set.radius);
    const double sup_h =
        covhom::norm(set.center, datum.norm) + set.radius * norm_over_euclid(datum.norm, datum.dimension());
    const double delta = eps * std::abs(datum.perturbation);
    return std::max(0.0, sup_f + 2.0 * delta + A * sup_h + B + t_max * (N + growth.rest));
}

// ---------------------------------------------------------------------------

namespace {

// Cumulative Jacobi length s -> int_0^s sqrt(2 (Vmax - V)/lambda) on the line (one-dimensional tori only).
class JacobiLength {
public:
    JacobiLength(const TorusHamiltonian& H, int samples = 4096) : table_(samples + 1, 0.0) {
        const double vmax = H.bounds().potential_max, lam = H.bounds().kinetic_max_eig;
        auto w = [&](double s) {
            return std::sqrt(std::max(0.0, 2.0 * (vmax - H.potential(Vec::Constant(1, s))) / lam));
        };
        double prev = w(0.0);
        for (int i = 1; i <= samples; ++i) {
            const double cur = w(static_cast<double>(i) / samples);
            table_[i] = table_[i - 1] + 0.5 * (prev + cur) / samples;
            prev = cur;
        }
    }
    double at(double s) const {
        const double fl = std::floor(s);
        const double f = (s - fl) * (table_.size() - 1);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(f), table_.size() - 2);
        const double frac = f - i;
        return fl * table_.back() + table_[i] + frac * (table_[i + 1] - table_[i]);
    }
    double between(double a, double b) const { return (1.0 - 1e-6) * std::abs(at(b) - at(a)); }

private:
    std::vector<double> table_;
};

}  // namespace

LaxOleinikResult lax_oleinik(const TorusHamiltonian& H, const InitialDatum& datum, const Vec& x, double t, double eps,
                             const LaxOleinikOptions& options) {
    require_positive_time(t, "lax_oleinik");
    if (!(eps > 0.0)) throw std::invalid_argument("lax_oleinik: epsilon must be positive");
    const int n = H.dimension();
    if (x.size() != n || datum.dimension() != n) throw ModelError("lax_oleinik: dimension mismatch");
    const bool rescaled = options.rescaled_lagrangian;
    const double kappa = rescaled ? eps * eps : 1.0;
    const double horizon = rescaled ? t : t / eps;
    const double scale = rescaled ? 1.0 : eps;
    const auto& bounds = H.bounds();
    const TorusCover cover{n};

    LaxOleinikResult out;
    out.radius = search_radius(datum, cover.lipschitz(datum.norm), lagrangian_growth(H), eps,
                               {eps * x, 0.0}, t);
    const double R = out.radius / eps;

    std::optional<JacobiLength> jacobi;
    if (n == 1 && !H.potential_poly().is_constant()) jacobi.emplace(H);

    // lower bound of scale * phi(y, x, horizon) given the Euclidean distance and the nearest point
    auto phi_lower = [&](double dist, const Vec& nearest) {
        double lb = kappa * dist * dist / (2.0 * bounds.kinetic_max_eig * horizon);
        if (jacobi) lb = std::max(lb, std::sqrt(kappa) * jacobi->between(nearest[0], x[0]));
        return scale * (lb - bounds.potential_max * horizon);
    };
    auto f_eps = [&](const Vec& y) { return datum.cover_value(y, eps); };
    auto total = [&](const Vec& y) {
        ++out.evaluations;
        return f_eps(y) + scale * minimal_action(H, y, x, horizon, kappa, options.trajectory);
    };

    double best = total(x);
    Vec best_y = x;

    struct Cell {
        double lb;
        IntVec k;
    };
    std::vector<Cell> cells;
    IntVec lo(n), hi(n);
    for (int d = 0; d < n; ++d) {
        lo[d] = static_cast<std::int64_t>(std::floor(x[d] - R));
        hi[d] = static_cast<std::int64_t>(std::floor(x[d] + R));
    }
    const double half_diag = 0.5 * std::sqrt(static_cast<double>(n));
    const double amp = eps * std::abs(datum.perturbation);
    IntVec k = lo;
    while (true) {
        Vec nearest(n), center(n);
        for (int d = 0; d < n; ++d) {
            nearest[d] = std::clamp(x[d], static_cast<double>(k[d]), static_cast<double>(k[d] + 1));
            center[d] = k[d] + 0.5;
        }
        const double dist = (nearest - x).norm();
        if (dist <= R) {
            const double lb = datum.lower_bound(eps * center, eps * half_diag) - amp + phi_lower(dist, nearest);
            cells.push_back({lb, k});
        }
        int d = 0;
        while (d < n && ++k[d] > hi[d]) {
            k[d] = lo[d];
            ++d;
        }
        if (d == n) break;
    }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.lb < b.lb; });

    const int m = options.mesh;
    for (const auto& cell : cells) {
        if (cell.lb >= best) break;
        std::vector<std::pair<double, Vec>> pts;
        std::vector<int> idx(n, 0);
        while (true) {
            Vec y(n);
            for (int d = 0; d < n; ++d) y[d] = cell.k[d] + static_cast<double>(idx[d]) / m;
            const double dist = (y - x).norm();
            if (dist <= R) {
                ++out.candidates;
                const double lb = f_eps(y) + phi_lower(dist, y);
                if (lb < best) pts.emplace_back(lb, y);
            }
            int d = 0;
            while (d < n && ++idx[d] == m) idx[d++] = 0;
            if (d == n) break;
        }
        std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [lb, y] : pts) {
            if (lb >= best) break;
            const double v = total(y);
            if (v < best) {
                best = v;
                best_y = y;
            }
        }
    }

    if (options.refine) {
        const double h = 1.0 / m;
        if (n == 1) {
            double v = kInf;
            const double y1 = opt::golden_section([&](double s) { return total(Vec::Constant(1, s)); },
                                                  best_y[0] - h, best_y[0] + h, 1e-9, &v);
            if (v < best) {
                best = v;
                best_y = Vec::Constant(1, y1);
            }
        } else {
            double v = kInf;
            opt::ZoomOptions zo;
            zo.points_per_axis = 5;
            zo.cells = 1.0;
            zo.tolerance = 1e-9;
            const Vec y1 = opt::zoom_minimize(total, best_y, h, zo, &v);
            if (v < best) {
                best = v;
                best_y = y1;
            }
        }
    }
    out.value = best;
    return out;
}

LaxOleinikResult lax_oleinik(const GraphCover& cover, const GraphLagrangian& L, const InitialDatum& datum,
                             const GraphPoint& x_in, double t, double eps, const LaxOleinikOptions& options) {
    require_positive_time(t, "lax_oleinik");
    if (!(eps > 0.0)) throw std::invalid_argument("lax_oleinik: epsilon must be positive");
    if (datum.dimension() != cover.rank()) throw ModelError("lax_oleinik: datum dimension must equal the deck rank");
    const GraphPoint x = cover.normalize(x_in);
    const auto& g = cover.graph();
    const bool rescaled = options.rescaled_lagrangian;
    const double kappa = rescaled ? eps * eps : 1.0;
    const double horizon = rescaled ? t : t / eps;
    const double scale = rescaled ? 1.0 : eps;
    const EdgeClasses classes = EdgeClasses::from_potentials(g, L.potentials());

    LaxOleinikResult out;
    out.radius = search_radius(datum, cover.lipschitz(datum.norm), lagrangian_growth(L), eps,
                               {f_eps(cover, x, eps), 0.0}, t);
    SearchOptions so;
    so.length_cap = out.radius / eps * (1.0 + 1e-12) + 1e-12;
    so.max_nodes = options.max_nodes;
    CoverSearch search(cover, classes, x, so);

    auto action = [&](const std::vector<PathLabel>& labs) {
        double a = kInf;
        for (const auto& l : labs) a = std::min(a, allocate_time(l, classes, horizon, kappa));
        return scale * a;
    };

    double best = kInf;
    GraphPoint best_y = x;
    const int m = options.mesh;
    const int rank = cover.rank();
    IntVec sheet(rank);

    // candidates along one edge lift with tail sheet `ts`
    auto scan_edge = [&](int e, const IntVec& ts, const std::vector<PathLabel>* tail_labs,
                         const std::vector<PathLabel>* head_labs) {
        const double len = g.edge(e).length;
        const int c = classes.of_edge[e];
        const auto bit = static_cast<std::uint8_t>(1u << c);
        const bool direct = !x.on_vertex() && x.edge == e && x.sheet == ts;
        std::vector<PathLabel> labs;
        for (int j = 1; j < m; ++j) {
            const double s = len * j / m;
            labs.clear();
            if (tail_labs)
                for (const auto& l : *tail_labs) {
                    PathLabel q = l;
                    q.length[c] += s;
                    q.total += s;
                    q.mask |= bit;
                    labs.push_back(q);
                }
            if (head_labs)
                for (const auto& l : *head_labs) {
                    PathLabel q = l;
                    q.length[c] += len - s;
                    q.total += len - s;
                    q.mask |= bit;
                    labs.push_back(q);
                }
            if (direct) {
                PathLabel q;
                q.length[c] = std::abs(s - x.s);
                q.total = q.length[c];
                q.mask = bit;
                labs.push_back(q);
            }
            if (labs.empty()) continue;
            ++out.candidates;
            const GraphPoint y = GraphPoint::on_edge(e, s, ts);
            const double v = datum.cover_value(cover, y, eps) + action(labs);
            ++out.evaluations;
            if (v < best) {
                best = v;
                best_y = y;
            }
        }
    };

    search.for_each_node([&](const NodeKey& key, const std::vector<PathLabel>& labs) {
        for (int i = 0; i < rank; ++i) sheet[i] = key.sheet[i];
        if (!labs.empty()) {
            ++out.candidates;
            ++out.evaluations;
            const GraphPoint y = GraphPoint::at_vertex(key.vertex, sheet);
            const double v = datum.cover_value(cover, y, eps) + action(labs);
            if (v < best) {
                best = v;
                best_y = y;
            }
        }
        for (const auto& inc : g.incidences(key.vertex)) {
            const auto& e = g.edge(inc.edge);
            if (inc.forward) {
                const IntVec hs = sheet + cover.shift(inc.edge);
                scan_edge(inc.edge, sheet, &labs, search.labels(e.head, hs));
            } else {
                const IntVec ts = sheet - cover.shift(inc.edge);
                if (search.labels(e.tail, ts)) continue;
                scan_edge(inc.edge, ts, nullptr, &labs);
            }
        }
    });
    if (!x.on_vertex()) {
        // x lies inside an edge lift whose endpoints might both be beyond the cap
        if (!search.labels(g.edge(x.edge).tail, x.sheet) &&
            !search.labels(g.edge(x.edge).head, IntVec(x.sheet + cover.shift(x.edge))))
            scan_edge(x.edge, x.sheet, nullptr, nullptr);
        const double v = datum.cover_value(cover, x, eps) + action(search.labels_to(x));
        if (v < best) {
            best = v;
            best_y = x;
        }
    }
    if (!std::isfinite(best)) throw SolverError("lax_oleinik: no candidate within the search radius");

    if (options.refine) {
        auto refine_edge = [&](int e, const IntVec& ts, double s_lo, double s_hi) {
            const double len = g.edge(e).length;
            s_lo = std::max(s_lo, 0.0);
            s_hi = std::min(s_hi, len);
            auto value = [&](double s) {
                const GraphPoint y = GraphPoint::on_edge(e, s, ts);
                const auto labs = search.labels_to(y);
                if (labs.empty()) return kInf;
                ++out.evaluations;
                return datum.cover_value(cover, y, eps) + action(labs);
            };
            double v = kInf;
            const double s = opt::golden_section(value, s_lo, s_hi, 1e-10 * len, &v);
            if (v < best) {
                best = v;
                best_y = cover.normalize(GraphPoint::on_edge(e, s, ts));
            }
        };
        if (best_y.on_vertex()) {
            const GraphPoint v0 = best_y;
            for (const auto& inc : g.incidences(v0.vertex)) {
                const double len = g.edge(inc.edge).length;
                if (inc.forward)
                    refine_edge(inc.edge, v0.sheet, 0.0, len / m);
                else
                    refine_edge(inc.edge, IntVec(v0.sheet - cover.shift(inc.edge)), len - len / m, len);
            }
        } else {
            const GraphPoint e0 = best_y;
            const double len = g.edge(e0.edge).length;
            refine_edge(e0.edge, e0.sheet, e0.s - len / m, e0.s + len / m);
        }
    }
    out.value = best;
    return out;
}

// ---------------------------------------------------------------------------

double hopf_lax(const ConvexFunction& beta, const InitialDatum& f, const Vec& h, double t,
                const HopfLaxOptions& options) {
    require_positive_time(t, "hopf_lax");
    const int k = beta.dimension();
    if (h.size() != k || f.dimension() != k) throw ModelError("hopf_lax: dimension mismatch");
    auto objective = [&](const Vec& q) { return f.limit(q) + t * beta.value((h - q) / t); };
    const double A2 = f.growth_slope() * norm_over_euclid(f.norm, k);
    const double B = f.growth_offset();
    const double upper = objective(h);

    double radius = kInf;
    for (double margin : {1.0, 0.25, 0.05}) {
        const double r = A2 + margin;
        const double cb = beta.conjugate_bound(r);
        if (std::isfinite(cb)) {
            radius = std::max(0.0, (upper + A2 * h.norm() + B + t * cb) / margin);
            break;
        }
    }
    if (!std::isfinite(radius)) throw SolverError("hopf_lax: no certified search radius for this datum slope");
    if (radius == 0.0) return upper;

    const int m = k <= 2 ? std::max(3, options.grid_points) : 11;
    Vec best = h;
    double best_v = upper;
    std::vector<int> idx(k, 0);
    const double spacing = 2.0 * radius / (m - 1);
    while (true) {
        Vec q(k);
        for (int d = 0; d < k; ++d) q[d] = h[d] - radius + spacing * idx[d];
        const double v = objective(q);
        if (v < best_v) {
            best_v = v;
            best = q;
        }
        int d = 0;
        while (d < k && ++idx[d] == m) idx[d++] = 0;
        if (d == k) break;
    }
    opt::ZoomOptions zo;
    zo.tolerance = options.tolerance;
    double v = kInf;
    opt::zoom_minimize(objective, best, 2.0 * spacing, zo, &v);
    return std::min(best_v, v);
}

}  // namespace covhom
