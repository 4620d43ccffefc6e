#include "covhom/topology.hpp"

#include "covhom/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <sstream>
#include <string>

namespace covhom {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLabelSlack = 1e-12;

bool dominates(const PathLabel& a, const PathLabel& b, int classes) {
    if ((a.mask & b.mask) != b.mask) return false;
    for (int c = 0; c < classes; ++c)
        if (a.length[c] > b.length[c] + kLabelSlack) return false;
    return true;
}

std::vector<PathLabel> pareto(std::vector<PathLabel> in, int classes) {
    std::sort(in.begin(), in.end(), [](const PathLabel& a, const PathLabel& b) { return a.total < b.total; });
    std::vector<PathLabel> out;
    for (const auto& l : in) {
        bool dominated = false;
        for (const auto& o : out)
            if (dominates(o, l, classes)) {
                dominated = true;
                break;
            }
        if (!dominated) out.push_back(l);
    }
    return out;
}

PathLabel extend(PathLabel l, int cls, double length, std::uint8_t mask) {
    l.length[cls] += length;
    l.total += length;
    l.mask |= mask;
    return l;
}

std::string sheet_string(const IntVec& s) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}
}  // namespace

// ---------------------------------------------------------------------------

GraphCover::GraphCover(std::shared_ptr<const MetricGraph> graph, IntMat shifts)
    : graph_(std::move(graph)), shifts_(std::move(shifts)) {
    if (!graph_) throw ModelError("cover needs a base graph");
    if (shifts_.cols() != graph_->edge_count()) throw ModelError("cover needs one shift vector per edge");
    if (shifts_.rows() > kMaxRank)
        throw ModelError("deck rank " + std::to_string(shifts_.rows()) + " exceeds the supported maximum " +
                         std::to_string(kMaxRank));
}

GraphCover GraphCover::maximal(std::shared_ptr<const MetricGraph> graph) {
    IntMat z(graph->rank(), graph->edge_count());
    for (int e = 0; e < graph->edge_count(); ++e) z.col(e) = graph->cocycle(e);
    return GraphCover(std::move(graph), std::move(z));
}

GraphPoint GraphCover::normalize(const GraphPoint& p) const {
    if (p.sheet.size() != rank()) throw ModelError("cover point sheet has wrong rank");
    if (p.on_vertex()) {
        if (p.vertex < 0 || p.vertex >= graph_->vertex_count()) throw ModelError("cover point vertex out of range");
        return p;
    }
    if (p.edge >= graph_->edge_count()) throw ModelError("cover point edge out of range");
    const auto& e = graph_->edge(p.edge);
    const double tol = 1e-12 * e.length;
    if (!std::isfinite(p.s) || p.s < -tol || p.s > e.length + tol)
        throw ModelError("arc length outside [0, edge length]");
    if (p.s <= tol) return GraphPoint::at_vertex(e.tail, p.sheet);
    if (p.s >= e.length - tol) return GraphPoint::at_vertex(e.head, p.sheet + shift(p.edge));
    return p;
}

Vec GraphCover::g_map(const GraphPoint& p) const {
    const GraphPoint q = normalize(p);
    Vec g = q.sheet.cast<double>();
    if (!q.on_vertex()) g += (q.s / graph_->edge(q.edge).length) * shift(q.edge).cast<double>();
    return g;
}

GraphPoint GraphCover::translate(const GraphPoint& p, const IntVec& z) const {
    if (z.size() != rank()) throw ModelError("deck translate has wrong rank");
    GraphPoint q = p;
    q.sheet += z;
    return q;
}

double GraphCover::lipschitz(Norm n) const {
    double k = 0.0;
    for (int e = 0; e < graph_->edge_count(); ++e)
        k = std::max(k, norm(shift(e).cast<double>(), n) / graph_->edge(e).length);
    return k;
}

Vec f_eps(const GraphCover& cover, const GraphPoint& x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("f_eps: epsilon must be positive");
    return eps * cover.g_map(x);
}

Vec f_eps(const TorusCover& cover, const Vec& x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("f_eps: epsilon must be positive");
    return eps * cover.g_map(x);
}

// ---------------------------------------------------------------------------

std::size_t NodeKeyHash::operator()(const NodeKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(k.vertex);
    for (auto s : k.sheet) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

EdgeClasses EdgeClasses::uniform(const MetricGraph& g) {
    EdgeClasses c;
    c.of_edge.assign(g.edge_count(), 0);
    c.potential = {0.0};
    c.vertex_mask.assign(g.vertex_count(), 1);
    return c;
}

EdgeClasses EdgeClasses::from_potentials(const MetricGraph& g, const std::vector<double>& potentials) {
    if (static_cast<int>(potentials.size()) != g.edge_count())
        throw ModelError("one potential per edge required");
    EdgeClasses c;
    std::vector<double> distinct = potentials;
    std::sort(distinct.begin(), distinct.end());
    for (double v : distinct)
        if (c.potential.empty() || std::abs(v - c.potential.back()) > 1e-12 * std::max(1.0, std::abs(v)))
            c.potential.push_back(v);
    if (c.count() > kMaxClasses)
        throw ModelError("at most " + std::to_string(kMaxClasses) + " distinct edge potentials are supported");
    c.of_edge.resize(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        int best = 0;
        for (int k = 1; k < c.count(); ++k)
            if (std::abs(c.potential[k] - potentials[e]) < std::abs(c.potential[best] - potentials[e])) best = k;
        c.of_edge[e] = best;
    }
    c.vertex_mask.assign(g.vertex_count(), 0);
    for (int v = 0; v < g.vertex_count(); ++v)
        for (const auto& inc : g.incidences(v)) c.vertex_mask[v] |= static_cast<std::uint8_t>(1u << c.of_edge[inc.edge]);
    return c;
}

NodeKey CoverSearch::key(int vertex, const IntVec& sheet) const {
    NodeKey k;
    k.vertex = vertex;
    for (Eigen::Index i = 0; i < sheet.size(); ++i) k.sheet[i] = static_cast<std::int32_t>(sheet[i]);
    return k;
}

CoverSearch::CoverSearch(const GraphCover& cover, const EdgeClasses& classes, const GraphPoint& source,
                         const SearchOptions& options)
    : cover_(cover), classes_(classes), source_(cover.normalize(source)) {
    const auto& g = cover.graph();
    const int rank = cover.rank();
    const int ncls = classes.count();

    struct Entry {
        double total;
        std::size_t node;
        std::size_t slot;
        bool operator>(const Entry& o) const {
            if (total != o.total) return total > o.total;
            if (node != o.node) return node > o.node;
            return slot > o.slot;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::vector<std::vector<char>> alive;
    std::vector<NodeKey> keys;

    auto inside = [&](const IntVec& sheet) {
        if (!options.window) return true;
        const auto& [lo, hi] = *options.window;
        for (int i = 0; i < rank; ++i)
            if (sheet[i] < lo[i] || sheet[i] > hi[i]) return false;
        return true;
    };

    auto add = [&](int vertex, const IntVec& sheet, const PathLabel& lab) {
        if (lab.total > options.length_cap) {
            capped_ = true;
            return;
        }
        const NodeKey k = key(vertex, sheet);
        auto it = index_.find(k);
        std::size_t idx;
        if (it == index_.end()) {
            if (nodes_.size() >= options.max_nodes)
                throw WindowExhausted("cover search exceeded " + std::to_string(options.max_nodes) + " nodes");
            idx = nodes_.size();
            index_.emplace(k, idx);
            nodes_.emplace_back();
            alive.emplace_back();
            keys.push_back(k);
        } else {
            idx = it->second;
        }
        auto& labs = nodes_[idx];
        auto& live = alive[idx];
        for (std::size_t i = 0; i < labs.size(); ++i)
            if (live[i] && dominates(labs[i], lab, ncls)) return;
        for (std::size_t i = 0; i < labs.size(); ++i)
            if (live[i] && dominates(lab, labs[i], ncls)) live[i] = 0;
        labs.push_back(lab);
        live.push_back(1);
        queue.push({lab.total, idx, labs.size() - 1});
    };

    if (source_.on_vertex()) {
        if (!inside(source_.sheet)) throw ModelError("search source lies outside the sheet window");
        PathLabel l;
        l.mask = classes.vertex_mask[source_.vertex];
        add(source_.vertex, source_.sheet, l);
    } else {
        const auto& e = g.edge(source_.edge);
        const int c = classes.of_edge[source_.edge];
        const auto bit = static_cast<std::uint8_t>(1u << c);
        const IntVec head_sheet = source_.sheet + cover.shift(source_.edge);
        if (inside(source_.sheet))
            add(e.tail, source_.sheet, extend({}, c, source_.s, bit | classes.vertex_mask[e.tail]));
        if (inside(head_sheet))
            add(e.head, head_sheet, extend({}, c, e.length - source_.s, bit | classes.vertex_mask[e.head]));
    }

    IntVec sheet(rank), next(rank);
    while (!queue.empty()) {
        const Entry top = queue.top();
        queue.pop();
        if (!alive[top.node][top.slot]) continue;
        const PathLabel lab = nodes_[top.node][top.slot];
        const NodeKey k = keys[top.node];
        for (int i = 0; i < rank; ++i) sheet[i] = k.sheet[i];
        for (const auto& inc : g.incidences(k.vertex)) {
            const auto& e = g.edge(inc.edge);
            const int w = inc.forward ? e.head : e.tail;
            if (inc.forward)
                next = sheet + cover.shift(inc.edge);
            else
                next = sheet - cover.shift(inc.edge);
            if (!inside(next)) {
                boundary_distance_ = std::min(boundary_distance_, lab.total);
                continue;
            }
            add(w, next, extend(lab, classes.of_edge[inc.edge], e.length, classes.vertex_mask[w]));
        }
    }

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        std::vector<PathLabel> kept;
        for (std::size_t j = 0; j < nodes_[i].size(); ++j)
            if (alive[i][j]) kept.push_back(nodes_[i][j]);
        nodes_[i] = std::move(kept);
    }
}

const std::vector<PathLabel>* CoverSearch::labels(const NodeKey& k) const {
    auto it = index_.find(k);
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

const std::vector<PathLabel>* CoverSearch::labels(int vertex, const IntVec& sheet) const {
    return labels(key(vertex, sheet));
}

std::vector<PathLabel> CoverSearch::labels_to(const GraphPoint& target) const {
    const GraphPoint t = cover_.normalize(target);
    if (t.on_vertex()) {
        const auto* l = labels(t.vertex, t.sheet);
        return l ? *l : std::vector<PathLabel>{};
    }
    const auto& e = cover_.graph().edge(t.edge);
    const int c = classes_.of_edge[t.edge];
    const auto bit = static_cast<std::uint8_t>(1u << c);
    std::vector<PathLabel> out;
    if (const auto* l = labels(e.tail, t.sheet))
        for (const auto& lab : *l) out.push_back(extend(lab, c, t.s, bit));
    if (const auto* l = labels(e.head, IntVec(t.sheet + cover_.shift(t.edge))))
        for (const auto& lab : *l) out.push_back(extend(lab, c, e.length - t.s, bit));
    if (!source_.on_vertex() && source_.edge == t.edge && source_.sheet == t.sheet)
        out.push_back(extend({}, c, std::abs(source_.s - t.s), bit));
    return pareto(std::move(out), classes_.count());
}

namespace {
void sheet_bounds(const GraphCover& cover, const GraphPoint& p, IntVec& lo, IntVec& hi) {
    lo = lo.cwiseMin(p.sheet);
    hi = hi.cwiseMax(p.sheet);
    if (!p.on_vertex()) {
        const IntVec h = p.sheet + cover.shift(p.edge);
        lo = lo.cwiseMin(h);
        hi = hi.cwiseMax(h);
    }
}
}  // namespace

double cover_distance(const GraphCover& cover, const GraphPoint& x, const GraphPoint& y) {
    const GraphPoint a = cover.normalize(x), b = cover.normalize(y);
    const auto& g = cover.graph();
    const EdgeClasses classes = EdgeClasses::uniform(g);
    const int k = cover.rank();
    IntVec lo = a.sheet, hi = a.sheet;
    sheet_bounds(cover, a, lo, hi);
    sheet_bounds(cover, b, lo, hi);
    std::int64_t margin = 1;
    if (k > 0 && std::isfinite(g.min_cycle_length()))
        margin = static_cast<std::int64_t>(std::ceil(g.diameter() * k / g.min_cycle_length())) + 1;
    for (int attempt = 0; attempt <= 10; ++attempt) {
        SearchOptions opt;
        opt.window = std::make_pair(IntVec(lo.array() - margin), IntVec(hi.array() + margin));
        CoverSearch search(cover, classes, a, opt);
        double d = kInf;
        for (const auto& l : search.labels_to(b)) d = std::min(d, l.total);
        if (std::isfinite(d) && d <= search.boundary_distance()) return d;
        margin *= 2;
    }
    throw WindowExhausted("cover_distance: no certified path from sheet " + sheet_string(a.sheet) + " to sheet " +
                          sheet_string(b.sheet) + " after 10 window doublings; enlarge the window");
}

double cover_distance(const TorusCover& cover, const Vec& x, const Vec& y) {
    if (x.size() != cover.dimension || y.size() != cover.dimension)
        throw ModelError("torus cover point has wrong dimension");
    return cover.distance(x, y);
}

// ---------------------------------------------------------------------------

SmithForm smith_normal_form(const IntMat& a) {
    const Eigen::Index m = a.rows(), n = a.cols();
    SmithForm sf;
    sf.diagonal = a;
    sf.left = IntMat::Identity(m, m);
    sf.right = IntMat::Identity(n, n);
    IntMat& d = sf.diagonal;
    IntMat& u = sf.left;
    IntMat& v = sf.right;

    auto row_add = [&](Eigen::Index dst, Eigen::Index src, std::int64_t q) {  // row dst -= q*row src
        d.row(dst) -= q * d.row(src);
        u.row(dst) -= q * u.row(src);
    };
    auto col_add = [&](Eigen::Index dst, Eigen::Index src, std::int64_t q) {
        d.col(dst) -= q * d.col(src);
        v.col(dst) -= q * v.col(src);
    };
    auto row_swap = [&](Eigen::Index i, Eigen::Index j) {
        if (i == j) return;
        d.row(i).swap(d.row(j));
        u.row(i).swap(u.row(j));
    };
    auto col_swap = [&](Eigen::Index i, Eigen::Index j) {
        if (i == j) return;
        d.col(i).swap(d.col(j));
        v.col(i).swap(v.col(j));
    };

    for (Eigen::Index t = 0; t < std::min(m, n); ++t) {
        while (true) {
            Eigen::Index pi = -1, pj = -1;
            std::int64_t best = 0;
            for (Eigen::Index i = t; i < m; ++i)
                for (Eigen::Index j = t; j < n; ++j)
                    if (d(i, j) != 0 && (best == 0 || std::abs(d(i, j)) < best)) {
                        best = std::abs(d(i, j));
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) break;
            row_swap(t, pi);
            col_swap(t, pj);
            bool clean = true;
            for (Eigen::Index i = t + 1; i < m; ++i) {
                row_add(i, t, d(i, t) / d(t, t));
                if (d(i, t) != 0) clean = false;
            }
            for (Eigen::Index j = t + 1; j < n; ++j) {
                col_add(j, t, d(t, j) / d(t, t));
                if (d(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            bool divides = true;
            for (Eigen::Index i = t + 1; i < m && divides; ++i)
                for (Eigen::Index j = t + 1; j < n; ++j)
                    if (d(i, j) % d(t, t) != 0) {
                        d.row(t) += d.row(i);
                        u.row(t) += u.row(i);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (d(t, t) < 0) {
            d.row(t) *= -1;
            u.row(t) *= -1;
        }
        if (d(t, t) == 0) break;
        sf.invariant_factors.push_back(d(t, t));
    }
    return sf;
}

SubcoverMap::SubcoverMap(IntMat f, Norm norm) : f_(std::move(f)), norm_(norm) {
    if (f_.rows() < 1 || f_.cols() < 1) throw ModelError("subcover matrix must be nonempty");
    if (f_.rows() > f_.cols()) throw ModelError("subcover matrix cannot be surjective: more rows than columns");
    smith_ = smith_normal_form(f_);
    const auto& inv = smith_.invariant_factors;
    if (static_cast<Eigen::Index>(inv.size()) != f_.rows() ||
        std::any_of(inv.begin(), inv.end(), [](std::int64_t x) { return x != 1; }))
        throw ModelError("subcover matrix is not surjective onto Z^l (invariant factors are not all 1)");
    const Eigen::Index r = f_.rows(), k = f_.cols();
    kernel_ = smith_.right.rightCols(k - r);

    const int dim = static_cast<int>(k - r);
    if (dim == 0) {
        density_ = 0.0;
    } else if (dim == 1) {
        density_ = 0.5 * covhom::norm(kernel_.col(0).cast<double>(), norm_);
    } else {
        // sample the fundamental cell and take the farthest point from the lattice
        const Mat kb = kernel_.cast<double>();
        const int per_axis = dim == 2 ? 33 : 9;
        std::vector<int> idx(dim, 0), off(dim, -1);
        while (true) {
            Vec c(dim);
            for (int i = 0; i < dim; ++i) c[i] = static_cast<double>(idx[i]) / (per_axis - 1);
            const Vec x = kb * c;
            double nearest = kInf;
            std::fill(off.begin(), off.end(), -1);
            while (true) {
                Vec w(dim);
                for (int i = 0; i < dim; ++i) w[i] = off[i];
                nearest = std::min(nearest, covhom::norm(x - kb * w, norm_));
                int i = 0;
                while (i < dim && ++off[i] > 2) off[i++] = -1;
                if (i == dim) break;
            }
            density_ = std::max(density_, nearest);
            int i = 0;
            while (i < dim && ++idx[i] == per_axis) idx[i++] = 0;
            if (i == dim) break;
        }
    }
}

IntVec SubcoverMap::lift_sheet(const IntVec& q) const {
    if (q.size() != f_.rows()) throw ModelError("quotient sheet has wrong rank");
    const IntVec uq = smith_.left * q;
    IntVec y = IntVec::Zero(f_.cols());
    y.head(f_.rows()) = uq;
    return smith_.right * y;
}

GraphCover SubcoverMap::quotient(const GraphCover& maximal) const {
    if (maximal.rank() != f_.cols()) throw ModelError("subcover matrix columns must equal the deck rank");
    return GraphCover(maximal.graph_ptr(), f_ * maximal.shifts());
}

double SubcoverMap::quotient_norm(const Vec& q) const {
    if (q.size() != f_.rows()) throw ModelError("quotient vector has wrong dimension");
    const Mat fd = f_.cast<double>();
    const Vec h0 = fd.transpose() * (fd * fd.transpose()).ldlt().solve(q);
    const int dim = static_cast<int>(kernel_.cols());
    if (dim == 0 || norm_ == Norm::L2) return covhom::norm(h0, norm_);
    const Mat kb = kernel_.cast<double>();
    const double radius = 2.0 * covhom::norm(h0, Norm::L2) * euclid_over_norm(norm_, f_.cols()) + 1.0;
    double best = 0.0;
    opt::ZoomOptions zo;
    zo.tolerance = 1e-12;
    opt::zoom_minimize([&](const Vec& w) { return covhom::norm(h0 + kb * w, norm_); }, Vec::Zero(dim),
                       radius / std::max(1e-12, kb.colwise().norm().minCoeff()), zo, &best);
    return best;
}

GraphPoint subcover_project(const SubcoverMap& sub, const GraphPoint& x) {
    if (x.sheet.size() != sub.source_rank()) throw ModelError("cover point sheet has wrong rank");
    GraphPoint q = x;
    q.sheet = sub.matrix() * x.sheet;
    return q;
}

Vec ghat_map(const SubcoverMap& sub, const GraphCover& quotient, const GraphPoint& xhat) {
    if (quotient.rank() != sub.target_rank()) throw ModelError("quotient cover rank does not match the subcover");
    return quotient.g_map(xhat);
}

double quotient_distance(const SubcoverMap& sub, const GraphCover& maximal, const GraphPoint& xhat,
                         const GraphPoint& yhat) {
    const GraphCover quot = sub.quotient(maximal);
    const GraphPoint xq = quot.normalize(xhat), yq = quot.normalize(yhat);
    const auto& g = maximal.graph();

    auto lift = [&](const GraphPoint& p) {
        GraphPoint l = p;
        l.sheet = sub.lift_sheet(p.sheet);
        return l;
    };
    const GraphPoint xt = lift(xq);
    GraphPoint yt = lift(yq);

    // pick the kernel translate whose G-image is closest to that of x
    const Mat kb = sub.kernel_basis().cast<double>();
    if (kb.cols() > 0) {
        const Vec gap = maximal.g_map(xt) - maximal.g_map(yt);
        const Vec w = (kb.transpose() * kb).ldlt().solve(kb.transpose() * gap);
        IntVec wi(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) wi[i] = static_cast<std::int64_t>(std::llround(w[i]));
        yt.sheet += sub.kernel_basis() * wi;
    }
    const double cap = cover_distance(maximal, xt, yt);

    const EdgeClasses classes = EdgeClasses::uniform(g);
    SearchOptions opt;
    opt.length_cap = cap + 1e-9 * std::max(1.0, cap);
    CoverSearch search(maximal, classes, xt, opt);

    const IntMat& f = sub.matrix();
    double best = cap;
    search.for_each_node([&](const NodeKey& key, const std::vector<PathLabel>& labs) {
        if (labs.empty()) return;
        IntVec sheet(maximal.rank());
        for (int i = 0; i < maximal.rank(); ++i) sheet[i] = key.sheet[i];
        const IntVec q = f * sheet;
        const double d0 = labs.front().total;
        if (yq.on_vertex()) {
            if (key.vertex == yq.vertex && q == yq.sheet) best = std::min(best, d0);
            return;
        }
        const auto& e = g.edge(yq.edge);
        if (key.vertex == e.tail && q == yq.sheet) best = std::min(best, d0 + yq.s);
        if (key.vertex == e.head && q == IntVec(yq.sheet + quot.shift(yq.edge)))
            best = std::min(best, d0 + e.length - yq.s);
    });
    if (!xq.on_vertex() && !yq.on_vertex() && xq.edge == yq.edge && xq.sheet == yq.sheet)
        best = std::min(best, std::abs(xq.s - yq.s));
    return best;
}

// ---------------------------------------------------------------------------

namespace {

GraphPoint random_point(const GraphCover& cover, int window, std::mt19937_64& rng) {
    const auto& g = cover.graph();
    std::uniform_int_distribution<int> sheet_dist(-window, window);
    IntVec sheet(cover.rank());
    for (int i = 0; i < cover.rank(); ++i) sheet[i] = sheet_dist(rng);
    std::uniform_int_distribution<int> kind(0, 2);
    if (g.edge_count() == 0 || kind(rng) == 0) {
        std::uniform_int_distribution<int> vd(0, g.vertex_count() - 1);
        return GraphPoint::at_vertex(vd(rng), sheet);
    }
    std::uniform_int_distribution<int> ed(0, g.edge_count() - 1);
    const int e = ed(rng);
    std::uniform_real_distribution<double> sd(0.0, g.edge(e).length);
    return cover.normalize(GraphPoint::on_edge(e, sd(rng), sheet));
}

// distance from r to the nearest point of Z^k + [0,1] * z
double distance_to_segment_lattice(const Vec& r, const Vec& z, Norm n) {
    auto frac_dist = [&](double t) {
        Vec d = r - t * z;
        for (Eigen::Index i = 0; i < d.size(); ++i) d[i] -= std::round(d[i]);
        return norm(d, n);
    };
    if (z.isZero()) return frac_dist(0.0);
    constexpr int pieces = 32;
    double best = std::min(frac_dist(0.0), frac_dist(1.0));
    for (int i = 0; i < pieces; ++i) {
        double v = 0.0;
        opt::golden_section(frac_dist, static_cast<double>(i) / pieces, static_cast<double>(i + 1) / pieces, 1e-10,
                            &v);
        best = std::min(best, v);
    }
    return best;
}

Vec random_in_ball(int dim, double radius, Norm n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-radius, radius);
    while (true) {
        Vec q(dim);
        for (int i = 0; i < dim; ++i) q[i] = u(rng);
        if (norm(q, n) <= radius) return q;
    }
}

void finish_report(SpaceConvergenceReport& rep) {
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.a_eps.size(); ++i)
        if (rep.a_eps[i] > rep.a_eps[i - 1] + 1e-15 || rep.covering_radius[i] > rep.covering_radius[i - 1] + 1e-12)
            decreasing = false;
    rep.pass = decreasing && !rep.a_eps.empty() && rep.a_eps.back() <= rep.tolerance &&
               rep.covering_radius.back() <= rep.tolerance;
}

void check_ladder(const std::vector<double>& epsilons, const SpaceSampling& s) {
    if (s.samples < 100) throw std::invalid_argument("estimate_space_convergence: at least 100 samples required");
    if (epsilons.empty()) throw std::invalid_argument("estimate_space_convergence: empty epsilon list");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw std::invalid_argument("estimate_space_convergence: epsilon must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("estimate_space_convergence: epsilon list must be decreasing");
    }
}

}  // namespace

SpaceConvergenceReport estimate_space_convergence(const GraphCover& cover, const std::vector<double>& epsilons,
                                                  Norm n, const SpaceSampling& s) {
    check_ladder(epsilons, s);
    std::mt19937_64 rng(s.seed);
    SpaceConvergenceReport rep;
    rep.tolerance = s.tolerance;
    rep.epsilons = epsilons;
    const int k = cover.rank();

    std::vector<std::pair<double, double>> pairs;  // (d, ||dG||)
    for (int i = 0; i < s.samples; ++i) {
        const GraphPoint x = random_point(cover, s.window, rng);
        const GraphPoint y = random_point(cover, s.window, rng);
        const double d = cover_distance(cover, x, y);
        const double dg = norm(cover.g_map(x) - cover.g_map(y), n);
        pairs.emplace_back(d, dg);
        if (d > 0.0) rep.lipschitz_fit = std::max(rep.lipschitz_fit, dg / d);
    }
    if (k > 0) {
        std::uniform_int_distribution<int> zd(-s.window, s.window);
        for (int i = 0; i < s.samples; ++i) {
            GraphPoint x = random_point(cover, s.window, rng);
            x = GraphPoint::at_vertex(0, x.sheet);
            IntVec z(k);
            do {
                for (int j = 0; j < k; ++j) z[j] = zd(rng);
            } while (z.isZero());
            const double d = cover_distance(cover, x, cover.translate(x, z));
            rep.orbit_ratio = std::max(rep.orbit_ratio, d / norm(z.cast<double>(), n));
        }
    }
    rep.k_constant = std::max({1.0, rep.lipschitz_fit, rep.orbit_ratio});

    double worst = 0.0;
    for (const auto& [d, dg] : pairs) worst = std::max(worst, d / rep.k_constant - dg);

    std::vector<Vec> probes;
    for (int i = 0; i < s.probes; ++i) probes.push_back(random_in_ball(k, s.ball_radius, n, rng));
    for (double eps : epsilons) {
        rep.a_eps.push_back(eps * worst);
        rep.a_over_eps.push_back(worst);
        double radius = 0.0;
        for (const auto& q : probes) {
            double best = kInf;
            const Vec r = q / eps;
            for (int e = 0; e < cover.graph().edge_count(); ++e)
                best = std::min(best, distance_to_segment_lattice(r, cover.shift(e).cast<double>(), n));
            if (cover.graph().edge_count() == 0) best = distance_to_segment_lattice(r, Vec::Zero(k), n);
            radius = std::max(radius, eps * best);
        }
        rep.covering_radius.push_back(radius);
    }
    finish_report(rep);
    return rep;
}

SpaceConvergenceReport estimate_space_convergence(const TorusCover& cover, const std::vector<double>& epsilons,
                                                  Norm n, const SpaceSampling& s) {
    check_ladder(epsilons, s);
    std::mt19937_64 rng(s.seed);
    SpaceConvergenceReport rep;
    rep.tolerance = s.tolerance;
    rep.epsilons = epsilons;
    const int dim = cover.dimension;
    std::uniform_real_distribution<double> u(-s.window, s.window);
    auto sample = [&] {
        Vec x(dim);
        for (int i = 0; i < dim; ++i) x[i] = u(rng);
        return x;
    };
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < s.samples; ++i) {
        const Vec x = sample(), y = sample();
        const double d = cover.distance(x, y);
        const double dg = norm(cover.g_map(x) - cover.g_map(y), n);
        pairs.emplace_back(d, dg);
        if (d > 0.0) rep.lipschitz_fit = std::max(rep.lipschitz_fit, dg / d);
    }
    std::uniform_int_distribution<int> zd(-s.window, s.window);
    for (int i = 0; i < s.samples; ++i) {
        const Vec x = sample().array().round().matrix();
        Vec z(dim);
        do {
            for (int j = 0; j < dim; ++j) z[j] = zd(rng);
        } while (z.isZero());
        rep.orbit_ratio = std::max(rep.orbit_ratio, cover.distance(x, x + z) / norm(z, n));
    }
    rep.k_constant = std::max({1.0, rep.lipschitz_fit, rep.orbit_ratio});
    double worst = 0.0;
    for (const auto& [d, dg] : pairs) worst = std::max(worst, d / rep.k_constant - dg);
    for (double eps : epsilons) {
        rep.a_eps.push_back(eps * worst);
        rep.a_over_eps.push_back(worst);
        rep.covering_radius.push_back(0.0);
    }
    finish_report(rep);
    return rep;
}

}  // namespace covhom
