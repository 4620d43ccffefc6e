#pragma once

#include "covhom/core.hpp"

#include <functional>
#include <vector>

namespace covhom {

/// One Fourier mode c*cos(2 pi k.x) + s*sin(2 pi k.x).
struct TrigTerm {
    IntVec frequency;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
};

/// Finite trigonometric polynomial of period 1 in every coordinate.
class TrigPolynomial {
public:
    TrigPolynomial() = default;
    TrigPolynomial(int dimension, std::vector<TrigTerm> terms);

    static TrigPolynomial constant(int dimension, double value);

    int dimension() const { return dimension_; }
    const std::vector<TrigTerm>& terms() const { return terms_; }

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;

    /// True when every mode has zero frequency.
    bool is_constant() const;
    /// sum |c|+|s| * (2 pi |k|)^order; bounds the order-th derivative in any unit direction.
    double derivative_bound(int order) const;

private:
    int dimension_ = 1;
    std::vector<TrigTerm> terms_;
};

/// Extremal quantities of a torus Hamiltonian. `*_upper`/`*_lower` are certified
/// envelopes derived from mesh samples plus derivative bounds.
struct TorusBounds {
    double kinetic_min_eig = 0.0;  ///< sampled minimum eigenvalue of A(x)
    double kinetic_max_eig = 0.0;  ///< certified upper bound on the largest eigenvalue of A(x)
    double potential_min = 0.0;    ///< certified lower bound on V
    double potential_max = 0.0;    ///< certified upper bound on V
    double potential_sampled_max = 0.0;
    double potential_sampled_min = 0.0;
    std::vector<Vec> wells;        ///< base-mesh points where V attains its sampled maximum
};

/// H(x,p) = 1/2 p.A(x)p + V(x) on the flat torus of dimension 1 or 2.
class TorusHamiltonian {
public:
    /// `kinetic` is a row-major n*n table of trig polynomials; it must be symmetric.
    TorusHamiltonian(int dimension, std::vector<TrigPolynomial> kinetic, TrigPolynomial potential);

    /// Identity kinetic matrix with the given potential.
    static TorusHamiltonian mechanical(int dimension, TrigPolynomial potential);

    int dimension() const { return n_; }
    Mat kinetic(const Vec& x) const;
    Mat kinetic_derivative(const Vec& x, int coordinate) const;
    double potential(const Vec& x) const { return potential_.value(x); }
    Vec potential_gradient(const Vec& x) const { return potential_.gradient(x); }
    const TrigPolynomial& potential_poly() const { return potential_; }
    const std::vector<TrigPolynomial>& kinetic_polys() const { return kinetic_; }

    double value(const Vec& x, const Vec& p) const;

    /// Closed-form L(x,v) = kappa/2 v.A(x)^{-1}v - V(x); kappa rescales velocities.
    /// Throws ModelError if A(x) is not positive definite.
    double lagrangian(const Vec& x, const Vec& v, double kappa = 1.0) const;

    /// Value of L with gradients in x and v. Returns false if A(x) is not positive definite.
    bool lagrangian_with_gradients(const Vec& x, const Vec& v, double kappa, double& value, Vec& grad_x,
                                   Vec& grad_v) const;

    /// True when neither A nor V depends on x.
    bool is_position_independent() const;

    const TorusBounds& bounds() const { return bounds_; }

private:
    void compute_bounds();

    int n_;
    std::vector<TrigPolynomial> kinetic_;
    TrigPolynomial potential_;
    TorusBounds bounds_;
};

/// L(x,v) = max_p [p.v - H(x,p)] via the closed form.
double legendre_transform(const TorusHamiltonian& h, const Vec& x, const Vec& v);

/// Concave maximisation of p.v - H(p) for a generic strictly convex superlinear H.
/// Used for test Hamiltonians without a closed-form dual.
double legendre_numeric(const std::function<double(const Vec&)>& hamiltonian, const Vec& v,
                        Vec* maximizer = nullptr);

struct TonelliReport {
    double min_eigenvalue = 0.0;
    double periodicity_residual = 0.0;
    double superlinearity_ratio = 0.0;  ///< min over samples of H(x,p)/|p| at the probe radius
    double probe_radius = 1e3;
    double probe_slope = 1e2;
    bool superlinear = false;
    bool pass = false;
};

/// Samples the Tonelli conditions on a uniform grid; failures are reported, not thrown.
TonelliReport verify_tonelli(const TorusHamiltonian& h, int grid_resolution = 16, double eigen_tolerance = 1e-12);

/// Per-edge speed law L_e(v) = 1/2 v^2 + V_e on a metric graph.
class GraphLagrangian {
public:
    GraphLagrangian() = default;
    explicit GraphLagrangian(std::vector<double> potentials);

    std::size_t edge_count() const { return potentials_.size(); }
    double potential(std::size_t edge) const { return potentials_.at(edge); }
    const std::vector<double>& potentials() const { return potentials_; }
    double min_potential() const;
    double max_potential() const;

    double value(std::size_t edge, double speed, double kappa = 1.0) const {
        return 0.5 * kappa * speed * speed + potentials_[edge];
    }

private:
    std::vector<double> potentials_;
};

}  // namespace covhom
