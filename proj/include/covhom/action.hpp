#pragma once

#include "covhom/core.hpp"
#include "covhom/model.hpp"
#include "covhom/topology.hpp"

#include <optional>
#include <vector>

namespace covhom {

// ---------------------------------------------------------------------------
// Initial data.

enum class DatumFamily { Affine, Cone, Quadratic };

DatumFamily parse_datum_family(const std::string& name);
std::string to_string(DatumFamily f);

/// Limit datum f on homology and its cover version f_eps = f o F_eps + eps * amp * bump.
/// The bump is cos(2 pi x_1) on the torus and cos(2 pi s / len) along graph edges.
struct InitialDatum {
    DatumFamily family = DatumFamily::Affine;
    double a = 0.0;  ///< affine / quadratic offset
    Vec P;           ///< affine slope
    double c = 1.0;  ///< cone coefficient
    int cone_dimension = 1;
    Vec b;           ///< quadratic linear part
    Mat Q;           ///< quadratic form, positive semidefinite
    Norm norm = Norm::L1;
    double perturbation = 0.0;
    /// When set, f(h) is evaluated as base(pullback * h).
    std::optional<Mat> pullback;

    static InitialDatum affine(double a, Vec P);
    static InitialDatum cone(double c, Norm n, int dimension);
    static InitialDatum quadratic(double a, Vec b, Mat Q);

    /// Dimension of the argument h.
    int dimension() const;
    void validate() const;

    double limit(const Vec& h) const;
    /// Lower and upper bounds of f over the Euclidean ball B(center, radius).
    double lower_bound(const Vec& center, double radius) const;
    double upper_bound(const Vec& center, double radius) const;
    /// Constants with f(h) >= -A ||h|| - B.
    double growth_slope() const;
    double growth_offset() const;

    double cover_value(const Vec& torus_point, double eps) const;
    double cover_value(const GraphCover& cover, const GraphPoint& x, double eps) const;
    /// Datum composed with a linear map: h -> f(m h).
    InitialDatum composed(const Mat& m) const;

private:
    int base_dimension() const;
    double base_value(const Vec& q) const;
    double base_lipschitz2() const;
};

// ---------------------------------------------------------------------------
// Minimal action.

/// Optimal split of a time budget over path pieces of given lengths and potentials,
/// with optional resting at `dwell_potential`:
///   min sum kappa l_i^2 / (2 tau_i) + V_i tau_i + V_dwell * rest,  sum tau_i + rest = T.
/// `dwell_potential` must not exceed the potential of any piece of positive length.
double allocate_time(const double* lengths, const double* potentials, int count, double dwell_potential, double T,
                     double kappa);

/// Energy multiplier lambda of the allocation: piece i moves at speed sqrt(2 (V_i + lambda) / kappa),
/// and lambda = -dwell_potential whenever part of the time is spent resting.
double allocation_multiplier(const double* lengths, const double* potentials, int count, double dwell_potential,
                             double T, double kappa);

/// Time allocation for a search label; dwelling is allowed in every class the label touches.
double allocate_time(const PathLabel& label, const EdgeClasses& classes, double T, double kappa);

double minimal_action(const GraphCover& cover, const GraphLagrangian& L, const GraphPoint& y, const GraphPoint& x,
                      double T, double kappa = 1.0);

struct TrajectoryOptions {
    int initial_segments = 64;
    int max_segments = 1 << 16;
    /// Stop doubling once the extrapolated action per unit time changes by less than this.
    double tolerance = 1e-6;
    int max_iterations = 100;  ///< Newton iterations per level
    int max_wells = 4;
};

struct TrajectoryResult {
    double action = 0.0;      ///< Richardson-extrapolated over the last two levels
    double raw_action = 0.0;  ///< action of the finest polygon
    int segments = 0;
    bool converged = false;
    std::vector<Vec> nodes;
};

/// Minimal action over polygons in R^n from y to x with equal time steps, refined by doubling.
/// Closed form when H does not depend on x.
TrajectoryResult trajectory_action(const TorusHamiltonian& H, const Vec& y, const Vec& x, double T,
                                   double kappa = 1.0, const TrajectoryOptions& options = {});

double minimal_action(const TorusHamiltonian& H, const Vec& y, const Vec& x, double T, double kappa = 1.0,
                      const TrajectoryOptions& options = {});

// ---------------------------------------------------------------------------
// Search radius.

/// L(x, v) >= quadratic * |v|^2 - offset and L(x, 0) <= rest.
struct GrowthBounds {
    double quadratic = 0.5;
    double offset = 0.0;
    double rest = 0.0;
};

GrowthBounds lagrangian_growth(const TorusHamiltonian& H, double kappa = 1.0);
GrowthBounds lagrangian_growth(const GraphLagrangian& L, double kappa = 1.0);

/// Euclidean ball of homology.
struct CompactSet {
    Vec center;
    double radius = 0.0;
};

/// Bound C on d_eps(x, y) for minimizers y of the Lax-Oleinik formula, x in F_eps^{-1}(K), t <= t_max.
/// `lipschitz` is the constant K0 of G with respect to the datum norm.
double search_radius(const InitialDatum& datum, double lipschitz, const GrowthBounds& growth, double eps,
                     const CompactSet& set, double t_max);

// ---------------------------------------------------------------------------
// Lax-Oleinik and Hopf-Lax.

struct LaxOleinikOptions {
    int mesh = 64;  ///< candidate points per unit cell or per edge
    bool refine = true;
    /// Evaluate with L_eps(x, v) = L(x, eps v) on horizon t instead of L on t/eps scaled by eps.
    bool rescaled_lagrangian = false;
    TrajectoryOptions trajectory;
    std::size_t max_nodes = 4'000'000;
};

struct LaxOleinikResult {
    double value = 0.0;
    double radius = 0.0;  ///< search radius C
    std::size_t candidates = 0;
    std::size_t evaluations = 0;
};

LaxOleinikResult lax_oleinik(const TorusHamiltonian& H, const InitialDatum& datum, const Vec& x, double t,
                             double eps, const LaxOleinikOptions& options = {});

LaxOleinikResult lax_oleinik(const GraphCover& cover, const GraphLagrangian& L, const InitialDatum& datum,
                             const GraphPoint& x, double t, double eps, const LaxOleinikOptions& options = {});

/// Convex superlinear function on R^k together with a bound on its convex conjugate.
class ConvexFunction {
public:
    virtual ~ConvexFunction() = default;
    virtual int dimension() const = 0;
    virtual double value(const Vec& v) const = 0;
    /// Upper bound of the conjugate over the Euclidean ball of radius r (may be +inf).
    virtual double conjugate_bound(double r) const = 0;
    double operator()(const Vec& v) const { return value(v); }
};

struct HopfLaxOptions {
    int grid_points = 41;
    double tolerance = 1e-11;
};

/// u(h, t) = min_q f(q) + t beta((h - q) / t).
double hopf_lax(const ConvexFunction& beta, const InitialDatum& f, const Vec& h, double t,
                const HopfLaxOptions& options = {});

}  // namespace covhom
