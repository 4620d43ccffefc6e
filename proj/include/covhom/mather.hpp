#pragma once

#include "covhom/action.hpp"
#include "covhom/model.hpp"
#include "covhom/topology.hpp"

#include <memory>
#include <vector>

namespace covhom {

// ---------------------------------------------------------------------------
// Graphs.

/// Threshold k at which the directed arc costs len*sqrt(2(V+k)) -/+ P.z_e admit no negative cycle.
double alpha_graph(const MetricGraph& g, const GraphLagrangian& L, const Vec& P, double tolerance = 1e-13);

/// Occupation data of a minimizing measure: the unique circulation with homology rate h,
/// traversed at the water-filling speeds, plus resting on a cheapest edge.
struct Circulation {
    std::vector<double> forward_rate;   ///< traversals per unit time, tail to head
    std::vector<double> backward_rate;  ///< traversals per unit time, head to tail
    std::vector<double> speed;          ///< 0 on edges that are not traversed
    std::vector<double> time_fraction;
    double rest_fraction = 0.0;
    int rest_edge = -1;
    double residual = 0.0;  ///< max flow conservation defect over vertices
    Vec rho;                ///< homology rate
    double action = 0.0;    ///< average action per unit time
};

Circulation beta_graph_measure(const MetricGraph& g, const GraphLagrangian& L, const Vec& h);
double beta_graph(const MetricGraph& g, const GraphLagrangian& L, const Vec& h);

// ---------------------------------------------------------------------------
// Tori.

struct MinimaxOptions {
    int mesh = 64;
    int restarts = 8;
    std::uint64_t seed = 7;
    std::vector<double> temperatures = {10.0, 100.0, 1000.0};
    std::vector<double> polish_temperatures = {1e4, 1e5};
    int max_iterations = 2000;
};

struct MinimaxResult {
    double value = 0.0;        ///< achieved discrete min-max
    double lower_bound = 0.0;  ///< averaging bound valid for the discrete problem
    bool converged = false;
    int restart = 0;  ///< which start produced the value (0 is u = 0)
};

/// min over mesh functions u of max over the mesh of H(x, P + Du), with Du by centered differences.
MinimaxResult alpha_torus_minimax(const TorusHamiltonian& H, const Vec& P, const MinimaxOptions& options = {});

// ---------------------------------------------------------------------------
// Evaluators.

class GraphAlpha : public ConvexFunction {
public:
    GraphAlpha(std::shared_ptr<const MetricGraph> g, GraphLagrangian L) : g_(std::move(g)), L_(std::move(L)) {}
    int dimension() const override { return g_->rank(); }
    double value(const Vec& P) const override { return alpha_graph(*g_, L_, P); }
    double conjugate_bound(double r) const override;

private:
    std::shared_ptr<const MetricGraph> g_;
    GraphLagrangian L_;
};

class GraphBeta : public ConvexFunction {
public:
    GraphBeta(std::shared_ptr<const MetricGraph> g, GraphLagrangian L) : g_(std::move(g)), L_(std::move(L)) {}
    int dimension() const override { return g_->rank(); }
    double value(const Vec& h) const override { return beta_graph(*g_, L_, h); }
    double conjugate_bound(double r) const override;

private:
    std::shared_ptr<const MetricGraph> g_;
    GraphLagrangian L_;
};

class TorusAlpha : public ConvexFunction {
public:
    TorusAlpha(std::shared_ptr<const TorusHamiltonian> H, MinimaxOptions options = {})
        : H_(std::move(H)), options_(std::move(options)) {}
    int dimension() const override { return H_->dimension(); }
    double value(const Vec& P) const override;
    double conjugate_bound(double r) const override;

private:
    std::shared_ptr<const TorusHamiltonian> H_;
    MinimaxOptions options_;
};

/// Closed-form beta for position-independent H(p) = 1/2 p.A p + V.
class FreeTorusBeta : public ConvexFunction {
public:
    explicit FreeTorusBeta(const TorusHamiltonian& H);
    int dimension() const override { return static_cast<int>(inverse_.rows()); }
    double value(const Vec& h) const override { return 0.5 * h.dot(inverse_ * h) - v_; }
    double conjugate_bound(double r) const override { return 0.5 * lambda_max_ * r * r + v_; }

private:
    Mat inverse_;
    double v_ = 0.0;
    double lambda_max_ = 0.0;
};

/// Uniform grid on the cube [-box, box]^k with `points` nodes per axis.
struct GridSpec {
    double box = 4.0;
    int points = 129;
};

/// Values of a function on a GridSpec, nodes in row-major order with the last axis fastest.
struct GridTable {
    int dimension = 1;
    GridSpec grid;
    std::vector<double> values;

    Vec node(std::size_t index) const;
    std::size_t size() const { return values.size(); }
};

GridTable tabulate(const ConvexFunction& f, const GridSpec& grid);

/// Largest violation of midpoint convexity along grid lines (0 for convex data).
double midpoint_convexity_residual(const GridTable& table);

/// Discrete Legendre-Fenchel transform x -> max over nodes q of (q.x - f(q)).
class DualEvaluator : public ConvexFunction {
public:
    explicit DualEvaluator(GridTable source);
    int dimension() const override { return source_.dimension; }
    double value(const Vec& x) const override;
    /// Value together with the maximizing node and whether it lies strictly inside the box.
    double value(const Vec& x, Vec* argmax, bool* interior) const;
    /// Bound of the source's convex hull over the cube containing the ball; +inf outside the box.
    double conjugate_bound(double r) const override;

    const GridTable& source() const { return source_; }
    double convexity_residual() const { return convexity_residual_; }
    bool convex() const { return convexity_residual_ < 1e-6; }
    double spacing() const;

private:
    GridTable source_;
    double convexity_residual_ = 0.0;
};

/// Tabulates `f` on the grid and returns its discrete dual.
DualEvaluator alpha_beta_duality(const ConvexFunction& f, const GridSpec& grid = {});

/// beta-hat(z) = min { beta(h) : f h = z }.
class BetaHat : public ConvexFunction {
public:
    BetaHat(SubcoverMap sub, std::shared_ptr<const ConvexFunction> beta);
    int dimension() const override { return sub_.target_rank(); }
    double value(const Vec& z) const override;
    double conjugate_bound(double r) const override;
    /// A minimizer h of beta on the slice f h = z.
    Vec minimizer(const Vec& z) const;

private:
    SubcoverMap sub_;
    std::shared_ptr<const ConvexFunction> beta_;
    Mat pinv_;
    Mat kernel_;
};

/// p -> alpha(f^T p).
class SubcoverAlpha : public ConvexFunction {
public:
    SubcoverAlpha(SubcoverMap sub, std::shared_ptr<const ConvexFunction> alpha);
    int dimension() const override { return sub_.target_rank(); }
    double value(const Vec& p) const override { return alpha_->value(sub_.pullback(p)); }
    double conjugate_bound(double r) const override;

private:
    SubcoverMap sub_;
    std::shared_ptr<const ConvexFunction> alpha_;
    double pinv_norm_ = 0.0;
};

double effective_hamiltonian_subcover(const SubcoverMap& sub, const ConvexFunction& alpha, const Vec& p);

// ---------------------------------------------------------------------------
// Long-horizon convergence of the averaged action.

struct MatpOptions {
    double rate_bound = 0.5;  ///< A: samples satisfy ||G(y) - G(x)|| / T <= A
    std::vector<double> horizons = {4, 8, 16, 32};
    int samples = 16;
    std::uint64_t seed = 11;
    double tolerance = 0.05;
    TrajectoryOptions trajectory;
};

struct MatpReport {
    std::vector<double> horizons;
    std::vector<double> delta;
    double rate_bound = 0.0;
    int samples = 0;
    bool decreasing = false;
    double tolerance = 0.0;
    bool pass = false;
};

MatpReport matp_check(const GraphCover& cover, const GraphLagrangian& L, const ConvexFunction& beta,
                      const MatpOptions& options = {});
MatpReport matp_check(const TorusHamiltonian& H, const ConvexFunction& beta, const MatpOptions& options = {});

}  // namespace covhom
