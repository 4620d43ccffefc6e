#include "covhom/homogenize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace covhom {

namespace {
constexpr double kExactFloor = 1e-10;

// Runs f(i) for i in [0, n) on up to `threads` workers and rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(guard);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string vec_string(const Vec& v) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ")";
    return os.str();
}

// Lexicographic comparison of integer sheets.
bool sheet_less(const IntVec& a, const IntVec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

// Nearest integer, halves going down.
IntVec round_down_ties(const Vec& v) {
    IntVec n(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) n[i] = static_cast<std::int64_t>(std::ceil(v[i] - 0.5));
    return n;
}

CompactSet enclosing_ball(const std::vector<EvaluationPoint>& points) {
    CompactSet k;
    k.center = Vec::Zero(points.front().h.size());
    for (const auto& p : points) k.center += p.h / static_cast<double>(points.size());
    for (const auto& p : points) k.radius = std::max(k.radius, (p.h - k.center).norm());
    k.radius += 0.5;
    return k;
}

bool monotone_errors(const std::vector<double>& err, double slack) {
    for (std::size_t i = 2; i < err.size(); ++i)
        if (err[i] > (1.0 + slack) * err[i - 1] + kExactFloor) return false;
    return true;
}

[[noreturn]] void rethrow_with_context(const Scenario& s, const Vec& h, double t, double eps,
                                       const std::exception& e) {
    std::ostringstream os;
    os << "scenario '" << s.name << "' at h=" << vec_string(h) << ", t=" << t << ", epsilon=" << eps << ": "
       << e.what();
    throw SolverError(os.str());
}

double datum_mesh_spacing(const Scenario& s) {
    if (s.system.kind == SystemKind::Torus) return 1.0 / s.lax.mesh;
    double len = 0.0;
    for (const auto& e : s.system.graph->edges()) len = std::max(len, e.length);
    return len / s.lax.mesh;
}

PointSummary summarize(const Scenario& s, const std::vector<ExperimentRow>& rows, int point, double threshold) {
    PointSummary ps;
    ps.h = s.points[point].h;
    ps.t = s.points[point].t;
    std::vector<double> err;
    for (const auto& r : rows)
        if (r.point == point) err.push_back(r.abs_error);
    ps.final_error = err.back();
    ps.fit = fit_rate(s.epsilons, err);
    ps.monotone = monotone_errors(err, s.tolerances.monotone_slack);
    ps.pass = ps.final_error < threshold && ps.monotone && (ps.fit.exact || (ps.fit.defined && ps.fit.rate > 0.0));
    return ps;
}

}  // namespace

// ---------------------------------------------------------------------------

System System::make_torus(TorusHamiltonian H) {
    System s;
    s.kind = SystemKind::Torus;
    s.torus = std::make_shared<const TorusHamiltonian>(std::move(H));
    return s;
}

System System::make_graph(MetricGraph g, GraphLagrangian L) {
    if (static_cast<int>(L.edge_count()) != g.edge_count())
        throw ModelError("graph Lagrangian needs one potential per edge");
    System s;
    s.kind = SystemKind::Graph;
    s.graph = std::make_shared<const MetricGraph>(std::move(g));
    s.lagrangian = std::move(L);
    return s;
}

int System::rank() const {
    if (kind == SystemKind::Torus) return torus ? torus->dimension() : 0;
    return graph ? graph->rank() : 0;
}

int Scenario::limit_dimension() const { return subcover ? static_cast<int>(subcover->rows()) : system.rank(); }

void Scenario::validate() const {
    if (system.kind == SystemKind::Torus && !system.torus) throw ConfigError("system", "missing torus Hamiltonian");
    if (system.kind == SystemKind::Graph && !system.graph) throw ConfigError("system", "missing graph");
    if (system.rank() < 1) throw ConfigError("system", "homology rank must be at least 1");
    if (subcover) {
        if (system.kind != SystemKind::Graph)
            throw ConfigError("cover.subcover", "subcover experiments need a graph system");
        if (subcover->cols() != system.rank())
            throw ConfigError("cover.subcover", "matrix must have one column per homology generator");
    }
    if (datum.dimension() != limit_dimension())
        throw ConfigError("datum", "dimension " + std::to_string(datum.dimension()) + " does not match homology rank " +
                                       std::to_string(limit_dimension()));
    if (epsilons.empty()) throw ConfigError("experiment.epsilons", "ladder is empty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i]))
            throw ConfigError("experiment.epsilons[" + std::to_string(i) + "]", "must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw ConfigError("experiment.epsilons[" + std::to_string(i) + "]", "ladder must be strictly decreasing");
    }
    if (points.empty()) throw ConfigError("experiment.points", "no evaluation points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string path = "experiment.points[" + std::to_string(i) + "]";
        if (points[i].h.size() != limit_dimension()) throw ConfigError(path + ".h", "wrong dimension");
        if (!points[i].h.allFinite()) throw ConfigError(path + ".h", "must be finite");
        if (!(points[i].t > 0.0) || !std::isfinite(points[i].t)) throw ConfigError(path + ".t", "must be positive");
    }
    if (lax.mesh < 2) throw ConfigError("compute.mesh", "must be at least 2");
    if (threads < 1) throw ConfigError("compute.threads", "must be at least 1");
}

// ---------------------------------------------------------------------------

TorusMatch match_torus(const Vec& h, double eps, int mesh) {
    TorusMatch m;
    m.x = round_down_ties(h * (mesh / eps)).cast<double>() / mesh;
    m.error = (eps * m.x - h).norm();
    return m;
}

GraphMatch match_graph(const GraphCover& cover, const Vec& h, double eps, int mesh) {
    const auto& g = cover.graph();
    const Vec target = h / eps;
    GraphMatch best;
    best.x = GraphPoint::at_vertex(0, round_down_ties(target));
    best.error = eps * (to_real(best.x.sheet) - target).norm();
    auto consider = [&](const GraphPoint& p) {
        const double err = eps * (cover.g_map(p) - target).norm();
        if (err < best.error - 1e-15 * (1.0 + best.error)) {
            best = {p, err};
        } else if (std::abs(err - best.error) <= 1e-15 * (1.0 + best.error) && sheet_less(p.sheet, best.x.sheet)) {
            best = {p, err};
        }
    };
    for (int e = 0; e < g.edge_count(); ++e) {
        const Vec z = to_real(cover.shift(e));
        for (int j = 1; j < mesh; ++j) {
            const double frac = static_cast<double>(j) / mesh;
            consider(GraphPoint::on_edge(e, frac * g.edge(e).length, round_down_ties(target - frac * z)));
        }
    }
    best.error = eps * (cover.g_map(best.x) - target).norm();
    return best;
}

std::string describe(const GraphPoint& p) {
    std::ostringstream os;
    os.precision(17);
    if (p.on_vertex())
        os << "v" << p.vertex;
    else
        os << "e" << p.edge << "@" << p.s;
    os << "[";
    for (Eigen::Index i = 0; i < p.sheet.size(); ++i) os << (i ? " " : "") << p.sheet[i];
    os << "]";
    return os.str();
}

RateFit fit_rate(const std::vector<double>& epsilons, const std::vector<double>& errors, int last) {
    if (epsilons.size() != errors.size()) throw std::invalid_argument("fit_rate: size mismatch");
    RateFit fit;
    const std::size_t n = errors.size();
    const std::size_t from = n > static_cast<std::size_t>(last) ? n - last : 0;
    std::vector<double> xs, ys;
    bool all_small = true;
    for (std::size_t i = from; i < n; ++i) {
        if (errors[i] > kExactFloor) {
            all_small = false;
            xs.push_back(std::log(epsilons[i]));
            ys.push_back(std::log(errors[i]));
        }
    }
    fit.exact = all_small;
    if (xs.size() < 2) return fit;
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) return fit;
    fit.defined = true;
    fit.rate = sxy / sxx;
    fit.constant = std::exp(my - fit.rate * mx);
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + fit.rate * (xs[i] - mx));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / xs.size());
    return fit;
}

std::shared_ptr<const ConvexFunction> make_alpha(const System& system, const MinimaxOptions& minimax) {
    if (system.kind == SystemKind::Graph) return std::make_shared<GraphAlpha>(system.graph, system.lagrangian);
    return std::make_shared<TorusAlpha>(system.torus, minimax);
}

std::shared_ptr<const ConvexFunction> make_beta(const System& system, const GridSpec& grid,
                                                const MinimaxOptions& minimax) {
    if (system.kind == SystemKind::Graph) return std::make_shared<GraphBeta>(system.graph, system.lagrangian);
    if (system.torus->is_position_independent()) return std::make_shared<FreeTorusBeta>(*system.torus);
    return std::make_shared<DualEvaluator>(alpha_beta_duality(TorusAlpha(system.torus, minimax), grid));
}

// ---------------------------------------------------------------------------

namespace {

Vec ball_sample(const CompactSet& set, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int k = static_cast<int>(set.center.size());
    Vec v(k);
    for (int d = 0; d < k; ++d) v[d] = normal(rng);
    const double nv = v.norm();
    if (nv > 0.0) v *= set.radius * std::pow(unif(rng), 1.0 / k) / nv;
    return set.center + v;
}

DatumConvergence finish_datum(DatumConvergence out) {
    out.pass = !out.residual.empty() && out.residual.back() < out.tolerance;
    for (std::size_t i = 1; i < out.residual.size(); ++i)
        if (out.residual[i] > out.residual[i - 1] + 1e-15) out.pass = false;
    return out;
}

}  // namespace

DatumConvergence function_convergence_check(const InitialDatum& datum, const GraphCover& cover,
                                            const std::vector<double>& epsilons, const CompactSet& set,
                                            int samples, std::uint64_t seed, double tolerance) {
    if (samples < 1) throw std::invalid_argument("function_convergence_check: need at least one sample");
    const auto& g = cover.graph();
    DatumConvergence out;
    out.epsilons = epsilons;
    out.tolerance = tolerance;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_edge(0, g.edge_count() - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double eps : epsilons) {
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const Vec h = ball_sample(set, rng);
            const IntVec sheet = round_down_ties(h / eps);
            const int e = pick_edge(rng);
            for (const GraphPoint& x :
                 {GraphPoint::at_vertex(0, sheet), GraphPoint::on_edge(e, unif(rng) * g.edge(e).length, sheet)}) {
                const double r = std::abs(datum.cover_value(cover, x, eps) - datum.limit(eps * cover.g_map(x)));
                worst = std::max(worst, r);
            }
        }
        out.residual.push_back(worst);
    }
    return finish_datum(std::move(out));
}

DatumConvergence function_convergence_check(const InitialDatum& datum, const TorusCover& cover,
                                            const std::vector<double>& epsilons, const CompactSet& set,
                                            int samples, std::uint64_t seed, double tolerance) {
    if (samples < 1) throw std::invalid_argument("function_convergence_check: need at least one sample");
    if (set.center.size() != cover.dimension) throw ModelError("function_convergence_check: dimension mismatch");
    DatumConvergence out;
    out.epsilons = epsilons;
    out.tolerance = tolerance;
    std::mt19937_64 rng(seed);
    for (double eps : epsilons) {
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const Vec x = ball_sample(set, rng) / eps;
            for (const Vec& y : {x, Vec(x.array().round().matrix())}) {
                const double r = std::abs(datum.cover_value(y, eps) - datum.limit(eps * cover.g_map(y)));
                worst = std::max(worst, r);
            }
        }
        out.residual.push_back(worst);
    }
    return finish_datum(std::move(out));
}

// ---------------------------------------------------------------------------

ExperimentReport run_experiment(const Scenario& s) {
    s.validate();
    if (s.subcover) return run_subcover_experiment(s);
    ExperimentReport rep;
    rep.scenario = s.name;
    const auto beta = make_beta(s.system, s.beta_grid, s.minimax);
    const bool torus = s.system.kind == SystemKind::Torus;
    std::optional<GraphCover> cover;
    if (!torus) cover.emplace(GraphCover::maximal(s.system.graph));

    const std::size_t np = s.points.size(), ne = s.epsilons.size();
    std::vector<double> limits(np);
    parallel_for(np, s.threads, [&](std::size_t p) {
        try {
            limits[p] = hopf_lax(*beta, s.datum, s.points[p].h, s.points[p].t, s.hopf);
        } catch (const std::exception& e) {
            rethrow_with_context(s, s.points[p].h, s.points[p].t, 0.0, e);
        }
    });

    rep.rows.resize(np * ne);
    parallel_for(np * ne, s.threads, [&](std::size_t task) {
        const int p = static_cast<int>(task / ne);
        const double eps = s.epsilons[task % ne];
        const auto& pt = s.points[p];
        ExperimentRow row;
        row.point = p;
        row.h = pt.h;
        row.t = pt.t;
        row.epsilon = eps;
        try {
            LaxOleinikResult lo;
            if (torus) {
                const auto m = match_torus(pt.h, eps, s.lax.mesh);
                row.matching_error = m.error;
                row.cover_point = vec_string(m.x);
                lo = lax_oleinik(*s.system.torus, s.datum, m.x, pt.t, eps, s.lax);
            } else {
                const auto m = match_graph(*cover, pt.h, eps, s.lax.mesh);
                row.matching_error = m.error;
                row.cover_point = describe(m.x);
                lo = lax_oleinik(*cover, s.system.lagrangian, s.datum, m.x, pt.t, eps, s.lax);
            }
            row.v_eps = lo.value;
            row.radius = lo.radius;
            row.candidates = lo.candidates;
            row.evaluations = lo.evaluations;
        } catch (const std::exception& e) {
            rethrow_with_context(s, pt.h, pt.t, eps, e);
        }
        row.u_limit = limits[p];
        row.abs_error = std::abs(row.v_eps - row.u_limit);
        rep.rows[task] = std::move(row);
    });

    const double k0 = torus ? TorusCover{s.system.rank()}.lipschitz(s.datum.norm) : cover->lipschitz(s.datum.norm);
    rep.mesh_tolerance = s.epsilons.back() * datum_mesh_spacing(s) * (1.0 + s.datum.growth_slope() * k0);
    rep.threshold = std::max(s.tolerances.homogenization, s.tolerances.mesh_factor * rep.mesh_tolerance);
    const CompactSet ball = enclosing_ball(s.points);
    if (torus) {
        rep.spaces = estimate_space_convergence(TorusCover{s.system.rank()}, s.epsilons, s.norm, s.spaces);
        rep.datum = function_convergence_check(s.datum, TorusCover{s.system.rank()}, s.epsilons, ball,
                                               s.datum_samples, s.seed, s.tolerances.datum);
    } else {
        rep.spaces = estimate_space_convergence(*cover, s.epsilons, s.norm, s.spaces);
        rep.datum =
            function_convergence_check(s.datum, *cover, s.epsilons, ball, s.datum_samples, s.seed, s.tolerances.datum);
    }
    rep.pass = rep.spaces.pass && rep.datum.pass;
    for (std::size_t p = 0; p < np; ++p) {
        rep.points.push_back(summarize(s, rep.rows, static_cast<int>(p), rep.threshold));
        rep.pass = rep.pass && rep.points.back().pass;
    }
    return rep;
}

ExperimentReport run_subcover_experiment(const Scenario& s) {
    s.validate();
    if (!s.subcover) throw ConfigError("cover.subcover", "scenario has no subcover map");
    const SubcoverMap sub(*s.subcover, s.norm);
    const GraphCover maximal = GraphCover::maximal(s.system.graph);
    const GraphCover quotient = sub.quotient(maximal);
    const auto& L = s.system.lagrangian;
    auto beta = std::make_shared<GraphBeta>(s.system.graph, L);
    auto alpha = std::make_shared<GraphAlpha>(s.system.graph, L);
    const BetaHat beta_hat(sub, beta);
    const InitialDatum lifted = s.datum.composed(sub.matrix().cast<double>());

    ExperimentReport rep;
    rep.scenario = s.name;
    const std::size_t np = s.points.size(), ne = s.epsilons.size();
    std::vector<double> limits(np);
    parallel_for(np, s.threads, [&](std::size_t p) {
        try {
            limits[p] = hopf_lax(beta_hat, s.datum, s.points[p].h, s.points[p].t, s.hopf);
        } catch (const std::exception& e) {
            rethrow_with_context(s, s.points[p].h, s.points[p].t, 0.0, e);
        }
    });

    std::vector<double> lift_residual(np * ne, 0.0);
    rep.rows.resize(np * ne);
    parallel_for(np * ne, s.threads, [&](std::size_t task) {
        const int p = static_cast<int>(task / ne);
        const double eps = s.epsilons[task % ne];
        const auto& pt = s.points[p];
        ExperimentRow row;
        row.point = p;
        row.h = pt.h;
        row.t = pt.t;
        row.epsilon = eps;
        try {
            const auto m = match_graph(quotient, pt.h, eps, s.lax.mesh);
            row.matching_error = m.error;
            row.cover_point = describe(m.x);
            const auto lo = lax_oleinik(quotient, L, s.datum, m.x, pt.t, eps, s.lax);
            row.v_eps = lo.value;
            row.radius = lo.radius;
            row.candidates = lo.candidates;
            row.evaluations = lo.evaluations;
            GraphPoint up = m.x;
            up.sheet = sub.lift_sheet(m.x.sheet);
            const auto full = lax_oleinik(maximal, L, lifted, up, pt.t, eps, s.lax);
            lift_residual[task] = std::abs(full.value - lo.value);
        } catch (const std::exception& e) {
            rethrow_with_context(s, pt.h, pt.t, eps, e);
        }
        row.u_limit = limits[p];
        row.abs_error = std::abs(row.v_eps - row.u_limit);
        rep.rows[task] = std::move(row);
    });

    rep.mesh_tolerance =
        s.epsilons.back() * datum_mesh_spacing(s) * (1.0 + s.datum.growth_slope() * quotient.lipschitz(s.datum.norm));
    rep.threshold = std::max(s.tolerances.homogenization, s.tolerances.mesh_factor * rep.mesh_tolerance);

    SubcoverChecks checks;
    checks.lift_residual = *std::max_element(lift_residual.begin(), lift_residual.end());
    checks.lift_pass = checks.lift_residual <= s.tolerances.lift + rep.mesh_tolerance;

    // u-tilde(q + z, t) = u-tilde(q, t) for kernel translates z
    const Mat pinv = sub.matrix().cast<double>().completeOrthogonalDecomposition().pseudoInverse();
    const Mat kernel = sub.kernel_basis().cast<double>();
    std::vector<double> inv(np, 0.0);
    parallel_for(np, s.threads, [&](std::size_t p) {
        const Vec q = pinv * s.points[p].h;
        const double base = hopf_lax(*beta, lifted, q, s.points[p].t, s.hopf);
        for (Eigen::Index c = 0; c < kernel.cols(); ++c)
            for (double mult : {1.0, -2.0}) {
                const double moved = hopf_lax(*beta, lifted, Vec(q + mult * kernel.col(c)), s.points[p].t, s.hopf);
                inv[p] = std::max(inv[p], std::abs(moved - base));
            }
    });
    checks.invariance_residual = *std::max_element(inv.begin(), inv.end());
    checks.invariance_pass = checks.invariance_residual <= s.tolerances.invariance;

    // effective Hamiltonian alpha(f^T p) against the discrete dual of beta-hat
    const DualEvaluator dual = alpha_beta_duality(beta_hat, s.beta_grid);
    const int l = sub.target_rank();
    const int per_axis = l == 1 ? 33 : 9;
    std::size_t total = 1;
    for (int d = 0; d < l; ++d) total *= per_axis;
    for (std::size_t i = 0; i < total; ++i) {
        Vec p(l);
        std::size_t idx = i;
        for (int d = l - 1; d >= 0; --d, idx /= per_axis)
            p[d] = -2.0 + 4.0 * static_cast<double>(idx % per_axis) / (per_axis - 1);
        if (l == 1) checks.p_grid.push_back(p[0]);
        const double diff = std::abs(effective_hamiltonian_subcover(sub, *alpha, p) - dual.value(p));
        checks.duality_residual = std::max(checks.duality_residual, diff);
    }
    checks.duality_pass = checks.duality_residual <= s.tolerances.duality;
    rep.subcover = checks;

    rep.spaces = estimate_space_convergence(quotient, s.epsilons, s.norm, s.spaces);
    rep.datum = function_convergence_check(s.datum, quotient, s.epsilons, enclosing_ball(s.points), s.datum_samples,
                                           s.seed, s.tolerances.datum);
    rep.pass = rep.spaces.pass && rep.datum.pass && checks.lift_pass && checks.invariance_pass && checks.duality_pass;
    for (std::size_t p = 0; p < np; ++p) {
        rep.points.push_back(summarize(s, rep.rows, static_cast<int>(p), rep.threshold));
        rep.pass = rep.pass && rep.points.back().pass;
    }
    return rep;
}

// ---------------------------------------------------------------------------

AffineCheckReport affine_datum_check(const Scenario& s, const Vec& P, double a) {
    if (s.subcover) throw ConfigError("cover.subcover", "affine check runs on the maximal cover");
    if (P.size() != s.system.rank()) throw ConfigError("datum.P", "wrong dimension");
    InitialDatum datum = InitialDatum::affine(a, P);
    datum.norm = s.datum.norm;
    AffineCheckReport rep;
    rep.alpha = make_alpha(s.system, s.minimax)->value(P);
    const bool torus = s.system.kind == SystemKind::Torus;
    std::optional<GraphCover> cover;
    if (!torus) cover.emplace(GraphCover::maximal(s.system.graph));
    const std::size_t np = s.points.size(), ne = s.epsilons.size();
    rep.rows.resize(np * ne);
    parallel_for(np * ne, s.threads, [&](std::size_t task) {
        const auto& pt = s.points[task / ne];
        const double eps = s.epsilons[task % ne];
        AffineRow row;
        row.h = pt.h;
        row.t = pt.t;
        row.epsilon = eps;
        try {
            if (torus) {
                const auto m = match_torus(pt.h, eps, s.lax.mesh);
                row.v_eps = lax_oleinik(*s.system.torus, datum, m.x, pt.t, eps, s.lax).value;
                row.exact = a + P.dot(eps * m.x) - rep.alpha * pt.t;
            } else {
                const auto m = match_graph(*cover, pt.h, eps, s.lax.mesh);
                row.v_eps = lax_oleinik(*cover, s.system.lagrangian, datum, m.x, pt.t, eps, s.lax).value;
                row.exact = a + P.dot(eps * cover->g_map(m.x)) - rep.alpha * pt.t;
            }
        } catch (const std::exception& e) {
            rethrow_with_context(s, pt.h, pt.t, eps, e);
        }
        row.deviation = std::abs(row.v_eps - row.exact);
        rep.rows[task] = std::move(row);
    });
    for (const auto& r : rep.rows) {
        rep.max_deviation = std::max(rep.max_deviation, r.deviation);
        rep.fitted_constant = std::max(rep.fitted_constant, r.deviation / r.epsilon);
    }
    return rep;
}

}  // namespace covhom
