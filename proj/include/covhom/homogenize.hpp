#pragma once

#include "covhom/action.hpp"
#include "covhom/mather.hpp"
#include "covhom/model.hpp"
#include "covhom/topology.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace covhom {

enum class SystemKind { Torus, Graph };

/// A torus Hamiltonian or a metric graph with its edge Lagrangian.
struct System {
    SystemKind kind = SystemKind::Torus;
    std::shared_ptr<const TorusHamiltonian> torus;
    std::shared_ptr<const MetricGraph> graph;
    GraphLagrangian lagrangian;

    static System make_torus(TorusHamiltonian H);
    static System make_graph(MetricGraph g, GraphLagrangian L);

    /// Dimension of H_1.
    int rank() const;
};

struct EvaluationPoint {
    Vec h;
    double t = 1.0;
};

struct ExperimentTolerances {
    double homogenization = 1e-2;
    double mesh_factor = 10.0;
    double monotone_slack = 0.05;
    double lift = 1e-9;
    double invariance = 1e-6;
    double duality = 1e-3;
    double datum = 0.05;
};

struct Scenario {
    std::string name = "scenario";
    System system;
    Norm norm = Norm::L1;
    InitialDatum datum;
    std::vector<double> epsilons;
    std::vector<EvaluationPoint> points;
    std::optional<IntMat> subcover;
    LaxOleinikOptions lax;
    HopfLaxOptions hopf;
    GridSpec beta_grid;
    MinimaxOptions minimax;
    SpaceSampling spaces;
    int datum_samples = 64;
    std::uint64_t seed = 1;
    int threads = 1;
    ExperimentTolerances tolerances;

    /// Throws ConfigError with a field path on the first violated invariant.
    void validate() const;
    /// Dimension of the homology the datum lives on (the subcover target when present).
    int limit_dimension() const;
};

/// Cover point nearest (in the Euclidean norm of H_1) to h among F_eps-images of the candidate mesh.
struct TorusMatch {
    Vec x;
    double error = 0.0;
};
struct GraphMatch {
    GraphPoint x;
    double error = 0.0;
};
TorusMatch match_torus(const Vec& h, double eps, int mesh);
GraphMatch match_graph(const GraphCover& cover, const Vec& h, double eps, int mesh);

std::string describe(const GraphPoint& p);

struct RateFit {
    bool defined = false;
    bool exact = false;  ///< all fitted errors vanish
    double rate = 0.0;
    double constant = 0.0;
    double residual = 0.0;  ///< rms of the log-log fit
};

/// Least squares log(err) = log(C) + r log(eps) over the last `last` rungs.
RateFit fit_rate(const std::vector<double>& epsilons, const std::vector<double>& errors, int last = 4);

std::shared_ptr<const ConvexFunction> make_alpha(const System& system, const MinimaxOptions& minimax);
std::shared_ptr<const ConvexFunction> make_beta(const System& system, const GridSpec& grid,
                                                const MinimaxOptions& minimax);

struct DatumConvergence {
    std::vector<double> epsilons;
    std::vector<double> residual;
    double tolerance = 0.0;
    bool pass = false;
};

/// sup over samples of F_eps^{-1}(K) of |f_eps - f o F_eps| for each rung.
DatumConvergence function_convergence_check(const InitialDatum& datum, const GraphCover& cover,
                                            const std::vector<double>& epsilons, const CompactSet& set,
                                            int samples, std::uint64_t seed, double tolerance);
DatumConvergence function_convergence_check(const InitialDatum& datum, const TorusCover& cover,
                                            const std::vector<double>& epsilons, const CompactSet& set,
                                            int samples, std::uint64_t seed, double tolerance);

struct ExperimentRow {
    int point = 0;
    Vec h;
    double t = 0.0;
    double epsilon = 0.0;
    std::string cover_point;
    double matching_error = 0.0;
    double v_eps = 0.0;
    double u_limit = 0.0;
    double abs_error = 0.0;
    double radius = 0.0;
    std::size_t candidates = 0;
    std::size_t evaluations = 0;
};

struct PointSummary {
    Vec h;
    double t = 0.0;
    double final_error = 0.0;
    RateFit fit;
    bool monotone = false;
    bool pass = false;
};

struct SubcoverChecks {
    double lift_residual = 0.0;
    double invariance_residual = 0.0;
    double duality_residual = 0.0;
    std::vector<double> p_grid;
    bool lift_pass = false;
    bool invariance_pass = false;
    bool duality_pass = false;
};

struct ExperimentReport {
    std::string scenario;
    std::vector<ExperimentRow> rows;
    std::vector<PointSummary> points;
    SpaceConvergenceReport spaces;
    DatumConvergence datum;
    std::optional<SubcoverChecks> subcover;
    double mesh_tolerance = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

ExperimentReport run_experiment(const Scenario& scenario);
/// Quotient-cover pipeline for scenarios with a subcover map (graph systems only).
ExperimentReport run_subcover_experiment(const Scenario& scenario);

struct AffineRow {
    Vec h;
    double t = 0.0;
    double epsilon = 0.0;
    double v_eps = 0.0;
    double exact = 0.0;  ///< a + P.F_eps(x_eps) - alpha(P) t
    double deviation = 0.0;
};

struct AffineCheckReport {
    double alpha = 0.0;
    std::vector<AffineRow> rows;
    double fitted_constant = 0.0;  ///< max deviation / eps
    double max_deviation = 0.0;
};

/// Compares v^eps for the datum a + P.h against the affine solution a + P.F_eps(x) - alpha(P) t.
AffineCheckReport affine_datum_check(const Scenario& scenario, const Vec& P, double a);

}  // namespace covhom
