#pragma once

#include "covhom/core.hpp"
#include "covhom/graph.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace covhom {

inline constexpr int kMaxRank = 6;
inline constexpr int kMaxClasses = 4;

/// A point of a graph cover: a base vertex, or a point at arc length `s` along an
/// edge, together with the deck sheet. On an edge the sheet is that of the tail lift.
struct GraphPoint {
    int vertex = -1;
    int edge = -1;
    double s = 0.0;
    IntVec sheet;

    static GraphPoint at_vertex(int v, IntVec sheet) { return {v, -1, 0.0, std::move(sheet)}; }
    static GraphPoint on_edge(int e, double s, IntVec sheet) { return {-1, e, s, std::move(sheet)}; }
    bool on_vertex() const { return edge < 0; }
};

/// Abelian cover of a metric graph given by integer edge shifts. For the maximal
/// free abelian cover the shifts are the cocycles; a subcover uses f * cocycle.
class GraphCover {
public:
    GraphCover(std::shared_ptr<const MetricGraph> graph, IntMat shifts);

    /// Maximal free abelian cover built from the spanning-tree cocycle basis.
    static GraphCover maximal(std::shared_ptr<const MetricGraph> graph);

    const MetricGraph& graph() const { return *graph_; }
    std::shared_ptr<const MetricGraph> graph_ptr() const { return graph_; }
    int rank() const { return static_cast<int>(shifts_.rows()); }
    IntVec shift(int edge) const { return shifts_.col(edge); }
    const IntMat& shifts() const { return shifts_; }

    /// Base point x0: vertex 0 on sheet 0.
    GraphPoint base_point() const { return GraphPoint::at_vertex(0, IntVec::Zero(rank())); }

    /// Validates and canonicalises a point (endpoints of edges become vertices).
    GraphPoint normalize(const GraphPoint& p) const;

    /// Integration of the cocycle from x0: sheet + (s/len) * shift.
    Vec g_map(const GraphPoint& p) const;

    /// Deck translate by z.
    GraphPoint translate(const GraphPoint& p, const IntVec& z) const;

    /// Lipschitz constant K0 of G with respect to the cover metric and `norm`.
    double lipschitz(Norm n) const;

private:
    std::shared_ptr<const MetricGraph> graph_;
    IntMat shifts_;
};

/// The cover R^n of the flat torus; G is the coordinate lift from the origin.
struct TorusCover {
    int dimension = 1;
    Vec g_map(const Vec& x) const { return x; }
    double distance(const Vec& x, const Vec& y) const { return (x - y).norm(); }
    double lipschitz(Norm n) const { return norm_over_euclid(n, dimension); }
};

Vec f_eps(const GraphCover& cover, const GraphPoint& x, double eps);
Vec f_eps(const TorusCover& cover, const Vec& x, double eps);

// ---------------------------------------------------------------------------
// Label search on the implicit cover graph.

struct NodeKey {
    int vertex = 0;
    std::array<std::int32_t, kMaxRank> sheet{};
    bool operator==(const NodeKey& o) const { return vertex == o.vertex && sheet == o.sheet; }
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept;
};

/// Path summary: length travelled in each potential class and the set of classes
/// the path touches (where it could dwell).
struct PathLabel {
    std::array<double, kMaxClasses> length{};
    std::uint8_t mask = 0;
    double total = 0.0;
};

/// Partition of edges into classes of equal potential.
struct EdgeClasses {
    std::vector<int> of_edge;
    std::vector<double> potential;  ///< per class
    std::vector<std::uint8_t> vertex_mask;
    int count() const { return static_cast<int>(potential.size()); }

    static EdgeClasses uniform(const MetricGraph& g);
    static EdgeClasses from_potentials(const MetricGraph& g, const std::vector<double>& potentials);
};

struct SearchOptions {
    double length_cap = std::numeric_limits<double>::infinity();
    /// When set, only sheets inside [lo, hi] (componentwise) are explored.
    std::optional<std::pair<IntVec, IntVec>> window;
    std::size_t max_nodes = 4'000'000;
};

/// Pareto label-setting search from a source point. With a single class it is Dijkstra.
class CoverSearch {
public:
    CoverSearch(const GraphCover& cover, const EdgeClasses& classes, const GraphPoint& source,
                const SearchOptions& options);

    const std::vector<PathLabel>* labels(const NodeKey& key) const;
    const std::vector<PathLabel>* labels(int vertex, const IntVec& sheet) const;

    /// Non-dominated labels from the source to an arbitrary cover point.
    std::vector<PathLabel> labels_to(const GraphPoint& target) const;

    /// Smallest label total among window-face nodes; +inf without a window.
    double boundary_distance() const { return boundary_distance_; }
    /// True if the length cap truncated the exploration.
    bool capped() const { return capped_; }

    template <class F>
    void for_each_node(F&& f) const {
        for (const auto& [key, idx] : index_) f(key, nodes_[idx]);
    }

    NodeKey key(int vertex, const IntVec& sheet) const;

private:
    const GraphCover& cover_;
    const EdgeClasses& classes_;
    GraphPoint source_;
    std::unordered_map<NodeKey, std::size_t, NodeKeyHash> index_;
    std::vector<std::vector<PathLabel>> nodes_;
    double boundary_distance_ = std::numeric_limits<double>::infinity();
    bool capped_ = false;
};

/// Shortest-path length in the cover. Searches a sheet window sized from the base
/// diameter, doubling it (at most 10 times) until the answer is certified.
double cover_distance(const GraphCover& cover, const GraphPoint& x, const GraphPoint& y);
double cover_distance(const TorusCover& cover, const Vec& x, const Vec& y);

// ---------------------------------------------------------------------------
// Subcovers.

struct SmithForm {
    IntMat left;      ///< unimodular U (rows x rows)
    IntMat diagonal;  ///< D = U * A * V
    IntMat right;     ///< unimodular V (cols x cols)
    std::vector<std::int64_t> invariant_factors;
};

SmithForm smith_normal_form(const IntMat& a);

/// Integer surjection f: Z^k -> Z^l defining a subcover of the maximal free abelian cover.
class SubcoverMap {
public:
    SubcoverMap(IntMat f, Norm norm = Norm::L1);

    const IntMat& matrix() const { return f_; }
    int source_rank() const { return static_cast<int>(f_.cols()); }
    int target_rank() const { return static_cast<int>(f_.rows()); }
    const std::vector<std::int64_t>& invariant_factors() const { return smith_.invariant_factors; }
    /// Basis of ker f intersected with Z^k, one column per generator.
    const IntMat& kernel_basis() const { return kernel_; }
    /// Covering radius of the kernel lattice inside ker f under the chosen norm.
    double density_constant() const { return density_; }
    Norm norm() const { return norm_; }

    Vec apply(const Vec& h) const { return f_.cast<double>() * h; }
    IntVec apply(const IntVec& n) const { return f_ * n; }
    /// Adjoint f*: (R^l)* -> H^1.
    Vec pullback(const Vec& p) const { return f_.cast<double>().transpose() * p; }
    /// Some integer n with f n = q.
    IntVec lift_sheet(const IntVec& q) const;

    /// Quotient cover of the maximal cover of `cover`'s graph.
    GraphCover quotient(const GraphCover& maximal) const;

    /// Quotient norm ||q||_f = min{||h|| : f h = q}.
    double quotient_norm(const Vec& q) const;

private:
    IntMat f_;
    SmithForm smith_;
    IntMat kernel_;
    double density_ = 0.0;
    Norm norm_;
};

/// Projection pi from the maximal cover to the quotient cover.
GraphPoint subcover_project(const SubcoverMap& sub, const GraphPoint& x);

/// G-hat on the quotient: f applied to the cocycle integral.
Vec ghat_map(const SubcoverMap& sub, const GraphCover& quotient, const GraphPoint& xhat);

/// Quotient metric: minimum of cover distances over ker-f translates of the lifts.
double quotient_distance(const SubcoverMap& sub, const GraphCover& maximal, const GraphPoint& xhat,
                         const GraphPoint& yhat);

// ---------------------------------------------------------------------------
// Convergence of rescaled covers to homology.

struct SpaceConvergenceReport {
    double k_constant = 1.0;
    double lipschitz_fit = 0.0;  ///< max ||dG||/d over samples
    double orbit_ratio = 0.0;    ///< max d/||dG|| over samples from the deck orbit of x0
    std::vector<double> epsilons;
    std::vector<double> a_eps;
    std::vector<double> covering_radius;
    std::vector<double> a_over_eps;
    double tolerance = 0.05;
    bool pass = false;
};

struct SpaceSampling {
    int samples = 200;
    int window = 4;          ///< sheets drawn from [-window, window]^k
    double ball_radius = 1;  ///< radius of the ball of H_1 probed for density
    int probes = 128;
    std::uint64_t seed = 1;
    double tolerance = 0.05;
};

SpaceConvergenceReport estimate_space_convergence(const GraphCover& cover, const std::vector<double>& epsilons,
                                                  Norm norm, const SpaceSampling& sampling);
SpaceConvergenceReport estimate_space_convergence(const TorusCover& cover, const std::vector<double>& epsilons,
                                                  Norm norm, const SpaceSampling& sampling);

}  // namespace covhom
