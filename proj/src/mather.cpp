#include "covhom/mather.hpp"

#include "covhom/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace covhom {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lagrangian(const MetricGraph& g, const GraphLagrangian& L) {
    if (static_cast<int>(L.edge_count()) != g.edge_count())
        throw ModelError("graph Lagrangian needs one potential per edge");
}

// Bellman-Ford from a virtual source joined to every vertex.
bool has_negative_cycle(int vertices, const std::vector<std::array<int, 2>>& arcs, const std::vector<double>& cost) {
    std::vector<double> dist(vertices, 0.0);
    for (int round = 0; round <= vertices; ++round) {
        bool changed = false;
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            const double cand = dist[arcs[a][0]] + cost[a];
            double& d = dist[arcs[a][1]];
            if (cand < d - 1e-14 * (1.0 + std::abs(d) + std::abs(cost[a]))) {
                d = cand;
                changed = true;
            }
        }
        if (!changed) return false;
    }
    return true;
}

Vec cube_vertex(int k, double r, int mask) {
    Vec v(k);
    for (int d = 0; d < k; ++d) v[d] = (mask >> d) & 1 ? r : -r;
    return v;
}

double max_over_cube(const ConvexFunction& f, double r) {
    const int k = f.dimension();
    double best = -kInf;
    for (int mask = 0; mask < (1 << k); ++mask) best = std::max(best, f.value(cube_vertex(k, r, mask)));
    return best;
}
}  // namespace

// ---------------------------------------------------------------------------

double alpha_graph(const MetricGraph& g, const GraphLagrangian& L, const Vec& P, double tolerance) {
    check_lagrangian(g, L);
    if (P.size() != g.rank()) throw ModelError("alpha_graph: cohomology vector has wrong dimension");
    if (!P.allFinite()) throw ModelError("alpha_graph: cohomology vector must be finite");
    const int m = g.edge_count();
    std::vector<std::array<int, 2>> arcs;
    std::vector<double> pz(m);
    for (int e = 0; e < m; ++e) {
        arcs.push_back({g.edge(e).tail, g.edge(e).head});
        arcs.push_back({g.edge(e).head, g.edge(e).tail});
        pz[e] = P.dot(to_real(g.cocycle(e)));
    }
    std::vector<double> cost(arcs.size());
    auto feasible = [&](double k) {
        for (int e = 0; e < m; ++e) {
            const double c = g.edge(e).length * std::sqrt(2.0 * std::max(0.0, L.potential(e) + k));
            cost[2 * e] = c - pz[e];
            cost[2 * e + 1] = c + pz[e];
        }
        return !has_negative_cycle(g.vertex_count(), arcs, cost);
    };
    const double vmin = L.min_potential();
    double lo = -vmin + 1e-12;
    if (feasible(lo)) return -vmin;
    double hi = lo;
    for (int e = 0; e < m; ++e) hi = std::max(hi, pz[e] * pz[e] / (2.0 * g.edge(e).length * g.edge(e).length) - vmin);
    hi += 1e-12 * (1.0 + std::abs(hi));
    while (!feasible(hi)) hi += 1.0 + std::abs(hi);
    for (int it = 0; it < 200 && hi - lo > tolerance * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

Circulation beta_graph_measure(const MetricGraph& g, const GraphLagrangian& L, const Vec& h) {
    check_lagrangian(g, L);
    const int k = g.rank(), m = g.edge_count();
    if (h.size() != k) throw ModelError("beta_graph: homology vector has wrong dimension");
    if (!h.allFinite()) throw ModelError("beta_graph: homology vector must be finite");
    Circulation c;
    std::vector<double> flow(m, 0.0);
    for (int j = 0; j < k; ++j) {
        const auto& cyc = g.fundamental_cycle(j);
        for (int e = 0; e < m; ++e) flow[e] += h[j] * cyc[e];
    }
    std::vector<double> lengths(m), pots(L.potentials());
    for (int e = 0; e < m; ++e) lengths[e] = g.edge(e).length * std::abs(flow[e]);
    const double vmin = L.min_potential();
    const double lam = allocation_multiplier(lengths.data(), pots.data(), m, vmin, 1.0, 1.0);
    c.action = allocate_time(lengths.data(), pots.data(), m, vmin, 1.0, 1.0);

    c.forward_rate.assign(m, 0.0);
    c.backward_rate.assign(m, 0.0);
    c.speed.assign(m, 0.0);
    c.time_fraction.assign(m, 0.0);
    double used = 0.0;
    for (int e = 0; e < m; ++e) {
        (flow[e] >= 0.0 ? c.forward_rate : c.backward_rate)[e] = std::abs(flow[e]);
        if (lengths[e] > 0.0) {
            c.speed[e] = std::sqrt(2.0 * std::max(0.0, pots[e] + lam));
            c.time_fraction[e] = lengths[e] / c.speed[e];
            used += c.time_fraction[e];
        }
    }
    c.rest_fraction = std::max(0.0, 1.0 - used);
    c.rest_edge = static_cast<int>(std::min_element(pots.begin(), pots.end()) - pots.begin());

    std::vector<double> balance(g.vertex_count(), 0.0);
    c.rho = Vec::Zero(k);
    for (int e = 0; e < m; ++e) {
        const double net = c.forward_rate[e] - c.backward_rate[e];
        balance[g.edge(e).tail] -= net;
        balance[g.edge(e).head] += net;
        c.rho += net * to_real(g.cocycle(e));
    }
    for (double b : balance) c.residual = std::max(c.residual, std::abs(b));
    return c;
}

double beta_graph(const MetricGraph& g, const GraphLagrangian& L, const Vec& h) {
    return beta_graph_measure(g, L, h).action;
}

// ---------------------------------------------------------------------------

namespace {

class MinimaxProblem {
public:
    MinimaxProblem(const TorusHamiltonian& H, const Vec& P, int mesh) : P_(P), n_(H.dimension()), m_(mesh) {
        size_ = n_ == 1 ? m_ : m_ * m_;
        A_.resize(size_);
        V_.resize(size_);
        plus_.assign(size_, {0, 0});
        minus_.assign(size_, {0, 0});
        for (int i = 0; i < size_; ++i) {
            const int ix = n_ == 1 ? i : i / m_, iy = n_ == 1 ? 0 : i % m_;
            Vec x(n_);
            x[0] = static_cast<double>(ix) / m_;
            if (n_ == 2) x[1] = static_cast<double>(iy) / m_;
            A_[i] = H.kinetic(x);
            V_[i] = H.potential(x);
            if (n_ == 1) {
                plus_[i][0] = (i + 1) % m_;
                minus_[i][0] = (i + m_ - 1) % m_;
            } else {
                plus_[i][0] = ((ix + 1) % m_) * m_ + iy;
                minus_[i][0] = ((ix + m_ - 1) % m_) * m_ + iy;
                plus_[i][1] = ix * m_ + (iy + 1) % m_;
                minus_[i][1] = ix * m_ + (iy + m_ - 1) % m_;
            }
        }
    }

    int size() const { return size_; }

    Vec momentum(const Vec& u, int i) const {
        Vec p = P_;
        for (int d = 0; d < n_; ++d) p[d] += (u[plus_[i][d]] - u[minus_[i][d]]) * (0.5 * m_);
        return p;
    }

    double energy(const Vec& u, int i) const {
        const Vec p = momentum(u, i);
        return 0.5 * p.dot(A_[i] * p) + V_[i];
    }

    double exact_max(const Vec& u) const {
        double best = -kInf;
        for (int i = 0; i < size_; ++i) best = std::max(best, energy(u, i));
        return best;
    }

    double smoothed(const Vec& u, Vec& grad, double temperature) const {
        std::vector<double> e(size_);
        double top = -kInf;
        for (int i = 0; i < size_; ++i) top = std::max(top, e[i] = energy(u, i));
        double z = 0.0;
        for (int i = 0; i < size_; ++i) z += (e[i] = std::exp(temperature * (e[i] - top)));
        grad.setZero(size_);
        for (int i = 0; i < size_; ++i) {
            const double w = e[i] / z;
            if (w < 1e-300) continue;
            const Vec q = A_[i] * momentum(u, i);
            for (int d = 0; d < n_; ++d) {
                grad[plus_[i][d]] += w * q[d] * 0.5 * m_;
                grad[minus_[i][d]] -= w * q[d] * 0.5 * m_;
            }
        }
        return top + std::log(z) / temperature;
    }

    double lower_bound() const {
        double vmax = -kInf, vmean = 0.0, lmin = kInf;
        for (int i = 0; i < size_; ++i) {
            vmax = std::max(vmax, V_[i]);
            vmean += V_[i] / size_;
            Eigen::SelfAdjointEigenSolver<Mat> es(A_[i], Eigen::EigenvaluesOnly);
            lmin = std::min(lmin, es.eigenvalues().minCoeff());
        }
        return std::max(vmax, 0.5 * std::max(0.0, lmin) * P_.squaredNorm() + vmean);
    }

private:
    Vec P_;
    int n_, m_, size_;
    std::vector<Mat> A_;
    std::vector<double> V_;
    std::vector<std::array<int, 2>> plus_, minus_;
};

}  // namespace

MinimaxResult alpha_torus_minimax(const TorusHamiltonian& H, const Vec& P, const MinimaxOptions& options) {
    const int n = H.dimension();
    if (P.size() != n) throw ModelError("alpha_torus_minimax: cohomology vector has wrong dimension");
    if (!P.allFinite()) throw ModelError("alpha_torus_minimax: cohomology vector must be finite");
    if (options.mesh < 4) throw std::invalid_argument("alpha_torus_minimax: mesh too coarse");
    MinimaxResult out;
    if (H.is_position_independent()) {
        out.value = H.value(Vec::Zero(n), P);
        out.lower_bound = out.value;
        out.converged = true;
        return out;
    }
    const MinimaxProblem prob(H, P, options.mesh);
    out.lower_bound = prob.lower_bound();
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    out.value = kInf;
    for (int r = 0; r <= options.restarts; ++r) {
        Vec u = Vec::Zero(prob.size());
        if (r > 0)
            for (int i = 0; i < prob.size(); ++i) u[i] = 0.05 * unif(rng);
        double best = prob.exact_max(u);
        bool converged = false;
        std::vector<double> schedule = options.temperatures;
        schedule.insert(schedule.end(), options.polish_temperatures.begin(), options.polish_temperatures.end());
        for (double temperature : schedule) {
            opt::LbfgsOptions lo;
            lo.max_iterations = options.max_iterations;
            lo.gradient_tolerance = 1e-12;
            auto res = opt::lbfgs([&](const Vec& x, Vec& g) { return prob.smoothed(x, g, temperature); }, u, lo);
            u = res.x;
            converged = res.converged;
            best = std::min(best, prob.exact_max(u));
        }
        if (best < out.value) {
            out.value = best;
            out.restart = r;
            out.converged = converged;
        }
    }
    if (out.value - out.lower_bound <= 1e-9 * (1.0 + std::abs(out.value))) out.converged = true;
    return out;
}

// ---------------------------------------------------------------------------

double GraphAlpha::conjugate_bound(double r) const {
    return max_over_cube(GraphBeta(g_, L_), r);
}

double GraphBeta::conjugate_bound(double r) const {
    return max_over_cube(GraphAlpha(g_, L_), r);
}

double TorusAlpha::value(const Vec& P) const { return alpha_torus_minimax(*H_, P, options_).value; }

double TorusAlpha::conjugate_bound(double r) const {
    const auto& b = H_->bounds();
    if (!(b.kinetic_min_eig > 0.0)) return kInf;
    return r * r / (2.0 * b.kinetic_min_eig) - b.potential_min;
}

FreeTorusBeta::FreeTorusBeta(const TorusHamiltonian& H) {
    if (!H.is_position_independent()) throw ModelError("closed-form beta needs a position-independent Hamiltonian");
    const int n = H.dimension();
    const Mat A = H.kinetic(Vec::Zero(n));
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ModelError("kinetic matrix is not positive definite");
    inverse_ = A.inverse();
    v_ = H.potential(Vec::Zero(n));
    lambda_max_ = es.eigenvalues().maxCoeff();
}

// ---------------------------------------------------------------------------

Vec GridTable::node(std::size_t index) const {
    Vec q(dimension);
    const double step = 2.0 * grid.box / (grid.points - 1);
    for (int d = dimension - 1; d >= 0; --d) {
        q[d] = -grid.box + step * static_cast<double>(index % grid.points);
        index /= grid.points;
    }
    return q;
}

GridTable tabulate(const ConvexFunction& f, const GridSpec& grid) {
    if (grid.points < 3 || !(grid.box > 0.0)) throw std::invalid_argument("grid needs box > 0 and at least 3 points");
    GridTable t;
    t.dimension = f.dimension();
    t.grid = grid;
    std::size_t total = 1;
    for (int d = 0; d < t.dimension; ++d) total *= static_cast<std::size_t>(grid.points);
    t.values.resize(total);
    for (std::size_t i = 0; i < total; ++i) t.values[i] = f.value(t.node(i));
    return t;
}

double midpoint_convexity_residual(const GridTable& table) {
    const std::size_t m = static_cast<std::size_t>(table.grid.points);
    double worst = 0.0;
    std::size_t stride = 1;
    for (int d = table.dimension - 1; d >= 0; --d, stride *= m) {
        for (std::size_t i = 0; i < table.size(); ++i) {
            const std::size_t coord = (i / stride) % m;
            if (coord == 0 || coord + 1 == m) continue;
            const double mid = 0.5 * (table.values[i - stride] + table.values[i + stride]);
            worst = std::max(worst, table.values[i] - mid);
        }
    }
    return worst;
}

DualEvaluator::DualEvaluator(GridTable source) : source_(std::move(source)) {
    convexity_residual_ = midpoint_convexity_residual(source_);
}

double DualEvaluator::spacing() const { return 2.0 * source_.grid.box / (source_.grid.points - 1); }

double DualEvaluator::value(const Vec& x) const { return value(x, nullptr, nullptr); }

double DualEvaluator::value(const Vec& x, Vec* argmax, bool* interior) const {
    if (x.size() != source_.dimension) throw ModelError("dual evaluator: argument has wrong dimension");
    double best = -kInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < source_.size(); ++i) {
        const double v = source_.node(i).dot(x) - source_.values[i];
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    const Vec q = source_.node(arg);
    if (argmax) *argmax = q;
    if (interior) *interior = (q.cwiseAbs().array() < source_.grid.box - 0.5 * spacing()).all();
    return best;
}

double DualEvaluator::conjugate_bound(double r) const {
    const double box = source_.grid.box;
    if (r > box) return kInf;
    const double reach = std::min(box, std::ceil(r / spacing() - 1e-12) * spacing()) + 1e-12;
    double best = -kInf;
    for (std::size_t i = 0; i < source_.size(); ++i)
        if (source_.node(i).cwiseAbs().maxCoeff() <= reach) best = std::max(best, source_.values[i]);
    return best;
}

DualEvaluator alpha_beta_duality(const ConvexFunction& f, const GridSpec& grid) {
    return DualEvaluator(tabulate(f, grid));
}

// ---------------------------------------------------------------------------

BetaHat::BetaHat(SubcoverMap sub, std::shared_ptr<const ConvexFunction> beta)
    : sub_(std::move(sub)), beta_(std::move(beta)) {
    if (beta_->dimension() != sub_.source_rank()) throw ModelError("beta-hat: beta has wrong dimension");
    const Mat f = sub_.matrix().cast<double>();
    pinv_ = f.completeOrthogonalDecomposition().pseudoInverse();
    kernel_ = sub_.kernel_basis().cast<double>();
}

Vec BetaHat::minimizer(const Vec& z) const {
    if (z.size() != dimension()) throw ModelError("beta-hat: argument has wrong dimension");
    const Vec h0 = pinv_ * z;
    const int j = static_cast<int>(kernel_.cols());
    if (j == 0) return h0;
    auto obj = [&](const Vec& w) { return beta_->value(h0 + kernel_ * w); };
    double radius = 1.0;
    Vec w = Vec::Zero(j);
    for (int round = 0; round < 30; ++round, radius *= 2.0) {
        double v = kInf;
        if (j == 1) {
            w[0] = opt::golden_section([&](double s) { return obj(Vec::Constant(1, s)); }, -radius, radius, 1e-12,
                                       &v);
        } else {
            opt::ZoomOptions zo;
            zo.tolerance = 1e-11;
            w = opt::zoom_minimize(obj, Vec::Zero(j), radius, zo, &v);
        }
        if (w.cwiseAbs().maxCoeff() < 0.75 * radius) break;
    }
    return h0 + kernel_ * w;
}

double BetaHat::value(const Vec& z) const { return beta_->value(minimizer(z)); }

double BetaHat::conjugate_bound(double r) const {
    Eigen::JacobiSVD<Mat> svd(sub_.matrix().cast<double>());
    return beta_->conjugate_bound(r * svd.singularValues()[0]);
}

SubcoverAlpha::SubcoverAlpha(SubcoverMap sub, std::shared_ptr<const ConvexFunction> alpha)
    : sub_(std::move(sub)), alpha_(std::move(alpha)) {
    if (alpha_->dimension() != sub_.source_rank()) throw ModelError("subcover alpha: alpha has wrong dimension");
    const Mat pinv = sub_.matrix().cast<double>().completeOrthogonalDecomposition().pseudoInverse();
    Eigen::JacobiSVD<Mat> svd(pinv);
    pinv_norm_ = svd.singularValues()[0];
}

double SubcoverAlpha::conjugate_bound(double r) const { return alpha_->conjugate_bound(pinv_norm_ * r); }

double effective_hamiltonian_subcover(const SubcoverMap& sub, const ConvexFunction& alpha, const Vec& p) {
    if (p.size() != sub.target_rank()) throw ModelError("effective Hamiltonian: covector has wrong dimension");
    return alpha.value(sub.pullback(p));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Vec> unit_ball_samples(int k, int count, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) {
        Vec v(k);
        for (int d = 0; d < k; ++d) v[d] = normal(rng);
        const double nv = v.norm();
        if (nv == 0.0) v.setZero();
        else v *= std::pow(unif(rng), 1.0 / k) / nv;
        out.push_back(v);
    }
    return out;
}

void validate_matp(const MatpOptions& o) {
    if (o.horizons.empty()) throw std::invalid_argument("matp_check: no horizons");
    for (std::size_t i = 0; i < o.horizons.size(); ++i) {
        if (!(o.horizons[i] > 0.0)) throw std::invalid_argument("matp_check: horizons must be positive");
        if (i > 0 && !(o.horizons[i] > o.horizons[i - 1]))
            throw std::invalid_argument("matp_check: horizons must increase");
    }
    if (o.samples < 1 || !(o.rate_bound > 0.0)) throw std::invalid_argument("matp_check: bad sampling parameters");
}

void finish(MatpReport& r) {
    r.decreasing = true;
    for (std::size_t i = 1; i < r.delta.size(); ++i)
        if (!(r.delta[i] < r.delta[i - 1]) && r.delta[i] > 1e-12) r.decreasing = false;
    r.pass = r.decreasing && r.delta.back() < r.tolerance;
}

}  // namespace

MatpReport matp_check(const GraphCover& cover, const GraphLagrangian& L, const ConvexFunction& beta,
                      const MatpOptions& options) {
    validate_matp(options);
    const auto& g = cover.graph();
    const int k = cover.rank();
    if (beta.dimension() != k) throw ModelError("matp_check: beta has wrong dimension");
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> pick_edge(0, g.edge_count() - 1), pick_vertex(0, g.vertex_count() - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<GraphPoint> starts;
    std::vector<int> ends;
    for (int i = 0; i < options.samples; ++i) {
        const int e = pick_edge(rng);
        starts.push_back(cover.normalize(GraphPoint::on_edge(e, unif(rng) * g.edge(e).length, IntVec::Zero(k))));
        ends.push_back(pick_vertex(rng));
    }
    const auto dirs = unit_ball_samples(k, options.samples, rng);

    MatpReport r;
    r.horizons = options.horizons;
    r.rate_bound = options.rate_bound;
    r.samples = options.samples;
    r.tolerance = options.tolerance;
    for (double T : options.horizons) {
        double delta = 0.0;
        for (int i = 0; i < options.samples; ++i) {
            const Vec gx = cover.g_map(starts[i]);
            IntVec sheet;
            Vec rho;
            for (double shrink = 1.0;; shrink *= 0.9) {
                const Vec target = gx + shrink * options.rate_bound * T * dirs[i];
                sheet = target.array().round().cast<std::int64_t>().matrix();
                rho = (to_real(sheet) - gx) / T;
                if (rho.norm() <= options.rate_bound || shrink < 1e-6) break;
            }
            if (rho.norm() > options.rate_bound) continue;
            const GraphPoint y = GraphPoint::at_vertex(ends[i], sheet);
            const double phi = minimal_action(cover, L, starts[i], y, T);
            delta = std::max(delta, std::abs(phi / T - beta.value(rho)));
        }
        r.delta.push_back(delta);
    }
    finish(r);
    return r;
}

MatpReport matp_check(const TorusHamiltonian& H, const ConvexFunction& beta, const MatpOptions& options) {
    validate_matp(options);
    const int n = H.dimension();
    if (beta.dimension() != n) throw ModelError("matp_check: beta has wrong dimension");
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> starts;
    for (int i = 0; i < options.samples; ++i) {
        Vec x(n);
        for (int d = 0; d < n; ++d) x[d] = unif(rng);
        starts.push_back(x);
    }
    const auto dirs = unit_ball_samples(n, options.samples, rng);

    MatpReport r;
    r.horizons = options.horizons;
    r.rate_bound = options.rate_bound;
    r.samples = options.samples;
    r.tolerance = options.tolerance;
    for (double T : options.horizons) {
        double delta = 0.0;
        for (int i = 0; i < options.samples; ++i) {
            const Vec rho = options.rate_bound * dirs[i];
            const double phi = minimal_action(H, starts[i], Vec(starts[i] + T * rho), T, 1.0, options.trajectory);
            delta = std::max(delta, std::abs(phi / T - beta.value(rho)));
        }
        r.delta.push_back(delta);
    }
    finish(r);
    return r;
}

}  // namespace covhom
