#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace covhom;
using fixtures::ivec;
using fixtures::vec;

namespace {

double ternary(const std::function<double(double)>& f, double lo, double hi) {
    for (int i = 0; i < 300; ++i) {
        const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
        if (f(a) < f(b))
            hi = b;
        else
            lo = a;
    }
    return f(0.5 * (lo + hi));
}

// two pieces with dwelling: nested convex search over the split
double allocate_two(double l1, double l2, double v1, double v2, double vd, double T) {
    auto inner = [&](double t1) {
        return ternary(
            [&](double t2) { return l1 * l1 / (2 * t1) + v1 * t1 + l2 * l2 / (2 * t2) + v2 * t2 + vd * (T - t1 - t2); },
            1e-12, T - t1);
    };
    return ternary(inner, 1e-12, T);
}

class QuadraticBeta : public ConvexFunction {
public:
    int dimension() const override { return 1; }
    double value(const Vec& v) const override { return 0.5 * v.squaredNorm(); }
    double conjugate_bound(double r) const override { return 0.5 * r * r; }
};

}  // namespace

TEST_CASE("time allocation for one piece") {
    const double l = 2.0, V = 0.5;
    double len[1] = {l}, pot[1] = {V};
    for (double T : {0.5, 1.0, 4.0}) CHECK(allocate_time(len, pot, 1, V, T, 1.0) == doctest::Approx(l * l / (2 * T) + V * T));
    // resting at a lower potential saturates once T passes l / sqrt(2 (V - Vd))
    const double t_star = l / std::sqrt(2 * V);
    CHECK(allocate_time(len, pot, 1, 0.0, 10.0, 1.0) == doctest::Approx(l * std::sqrt(2 * V)));
    CHECK(allocate_time(len, pot, 1, 0.0, 0.5 * t_star, 1.0) ==
          doctest::Approx(l * l / t_star + V * 0.5 * t_star));
    CHECK(allocation_multiplier(len, pot, 1, 0.0, 10.0, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("time allocation matches brute force") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    for (int i = 0; i < 12; ++i) {
        const double l1 = U(rng), l2 = U(rng), v1 = U(rng) - 0.1, v2 = U(rng) - 0.1;
        const double vd = std::min(v1, v2) - 0.3 * U(rng);
        const double T = 2.0 * U(rng);
        double len[2] = {l1, l2}, pot[2] = {v1, v2};
        CHECK(allocate_time(len, pot, 2, vd, T, 1.0) ==
              doctest::Approx(allocate_two(l1, l2, v1, v2, vd, T)).epsilon(1e-7));
    }
}

TEST_CASE("kappa rescales the kinetic term") {
    double len[2] = {1.0, 0.7}, pot[2] = {0.2, 0.4};
    const double kappa = 0.3, T = 1.5;
    // kappa l^2 / (2 tau) = (sqrt(kappa) l)^2 / (2 tau)
    double scaled[2] = {std::sqrt(kappa) * 1.0, std::sqrt(kappa) * 0.7};
    CHECK(allocate_time(len, pot, 2, 0.1, T, kappa) == doctest::Approx(allocate_time(scaled, pot, 2, 0.1, T, 1.0)));
}

TEST_CASE("graph minimal action: free loop") {
    const GraphCover c = GraphCover::maximal(fixtures::loop(1.0));
    const GraphLagrangian L({0.0});
    const GraphPoint x0 = c.base_point();
    CHECK(minimal_action(c, L, x0, GraphPoint::at_vertex(0, ivec({3})), 2.0) == doctest::Approx(9.0 / 4.0));
    CHECK(minimal_action(c, L, x0, x0, 2.0) == doctest::Approx(0.0));
    CHECK(minimal_action(c, L, x0, GraphPoint::on_edge(0, 0.25, ivec({-1})), 0.5) ==
          doctest::Approx(0.75 * 0.75 / 1.0));
}

TEST_CASE("graph minimal action: constant potential adds V T") {
    const GraphCover c = GraphCover::maximal(fixtures::loop(2.0));
    const GraphLagrangian L({0.5});
    for (double T : {0.5, 1.0, 3.0}) {
        const double d = 2.0 * 2 + 0.5;
        CHECK(minimal_action(c, L, c.base_point(), GraphPoint::on_edge(0, 0.5, ivec({2})), T) ==
              doctest::Approx(d * d / (2 * T) + 0.5 * T));
    }
}

TEST_CASE("graph minimal action: rest on the cheaper loop") {
    const GraphCover c = GraphCover::maximal(fixtures::figure_eight(1.0, 1.0));
    const GraphLagrangian L({0.0, 0.5});
    const GraphPoint target = GraphPoint::at_vertex(0, ivec({0, 1}));
    // crossing the loop of potential 1/2 takes time 1 at the optimal speed
    CHECK(minimal_action(c, L, c.base_point(), target, 2.0) == doctest::Approx(1.0));
    CHECK(minimal_action(c, L, c.base_point(), target, 0.5) == doctest::Approx(1.0 + 0.25));
}

TEST_CASE("graph minimal action: deck invariance and triangle inequality in time") {
    const GraphCover c = GraphCover::maximal(fixtures::theta());
    const GraphLagrangian L({0.1, 0.3, 0.2});
    const GraphPoint y = GraphPoint::on_edge(1, 0.4, ivec({0, 0}));
    const GraphPoint x = GraphPoint::on_edge(2, 1.1, ivec({1, -1}));
    const GraphPoint z = GraphPoint::at_vertex(1, ivec({1, 0}));
    const double a = minimal_action(c, L, y, x, 2.0);
    CHECK(minimal_action(c, L, c.translate(y, ivec({2, 1})), c.translate(x, ivec({2, 1})), 2.0) ==
          doctest::Approx(a).epsilon(1e-12));
    CHECK(a <= minimal_action(c, L, y, z, 0.8) + minimal_action(c, L, z, x, 1.2) + 1e-9);
}

TEST_CASE("torus trajectories") {
    SUBCASE("free torus closed form") {
        const TorusHamiltonian H = fixtures::free_torus(2);
        const Vec y = vec({0.1, -0.3}), x = vec({1.4, 0.9});
        CHECK(minimal_action(H, y, x, 1.5) == doctest::Approx((x - y).squaredNorm() / 3.0));
    }
    SUBCASE("pendulum resting at the top of the potential") {
        const TorusHamiltonian H = fixtures::pendulum();
        for (double T : {1.0, 3.0}) CHECK(minimal_action(H, vec({0.0}), vec({0.0}), T) == doctest::Approx(-T).epsilon(1e-6));
    }
    SUBCASE("pendulum semigroup") {
        const TorusHamiltonian H = fixtures::pendulum();
        const Vec y = vec({0.1}), x = vec({0.9});
        const double whole = minimal_action(H, y, x, 2.0);
        double best = 1e300;
        for (int i = 0; i <= 140; ++i) {
            const Vec z = vec({-0.2 + 1.4 * i / 140.0});
            const double split = minimal_action(H, y, z, 1.0) + minimal_action(H, z, x, 1.0);
            CHECK(whole <= split + 1e-6);
            best = std::min(best, split);
        }
        CHECK(best == doctest::Approx(whole).epsilon(2e-3));
    }
    SUBCASE("trajectory endpoints and refinement") {
        const TrajectoryResult r = trajectory_action(fixtures::pendulum(), vec({0.2}), vec({1.7}), 1.0);
        CHECK(r.converged);
        REQUIRE(!r.nodes.empty());
        CHECK(r.nodes.front()[0] == doctest::Approx(0.2));
        CHECK(r.nodes.back()[0] == doctest::Approx(1.7));
        CHECK(r.segments >= 64);
        CHECK(std::abs(r.action - r.raw_action) < 1e-3);
    }
}

TEST_CASE("initial datum families") {
    const InitialDatum aff = InitialDatum::affine(0.5, vec({1.0, -2.0}));
    CHECK(aff.limit(vec({2.0, 1.0})) == doctest::Approx(0.5));
    const InitialDatum cone = InitialDatum::cone(2.0, Norm::L1, 2);
    CHECK(cone.limit(vec({-1.0, 0.5})) == doctest::Approx(3.0));
    Mat Q(1, 1);
    Q << 2.0;
    const InitialDatum quad = InitialDatum::quadratic(1.0, vec({-1.0}), Q);
    CHECK(quad.limit(vec({3.0})) == doctest::Approx(1.0 - 3.0 + 9.0));

    SUBCASE("ball bounds enclose samples") {
        std::mt19937_64 rng(9);
        std::normal_distribution<double> N;
        const Vec center = vec({0.3, -0.4});
        for (const InitialDatum* f : {&aff, &cone}) {
            const double lo = f->lower_bound(center, 0.7), hi = f->upper_bound(center, 0.7);
            for (int i = 0; i < 200; ++i) {
                Vec d = vec({N(rng), N(rng)});
                d *= 0.7 * std::sqrt(std::uniform_real_distribution<double>(0, 1)(rng)) / d.norm();
                const double v = f->limit(center + d);
                CHECK(v >= lo - 1e-12);
                CHECK(v <= hi + 1e-12);
            }
        }
    }
    SUBCASE("growth constants") {
        for (double r : {0.0, 1.0, 10.0, 100.0}) {
            const Vec h = vec({r, -r}) / std::sqrt(2.0);
            CHECK(aff.limit(h) >= -aff.growth_slope() * h.norm() - aff.growth_offset() - 1e-12);
            CHECK(cone.limit(h) >= -cone.growth_slope() * h.norm() - cone.growth_offset() - 1e-12);
        }
    }
    SUBCASE("cover values") {
        InitialDatum f = InitialDatum::affine(0.0, vec({0.7}));
        f.perturbation = 0.3;
        const double eps = 0.25;
        CHECK(f.cover_value(vec({1.2}), eps) == doctest::Approx(0.7 * 0.3 + eps * 0.3 * std::cos(2 * M_PI * 1.2)));
        const GraphCover c = GraphCover::maximal(fixtures::loop(2.0));
        const GraphPoint x = GraphPoint::on_edge(0, 0.5, ivec({3}));
        CHECK(f.cover_value(c, x, eps) == doctest::Approx(0.7 * eps * 3.25 + eps * 0.3 * std::cos(2 * M_PI * 0.25)));
    }
    SUBCASE("composition") {
        Mat m(2, 1);
        m << 1.0, 1.0;
        const InitialDatum g = cone.composed(m);
        CHECK(g.dimension() == 1);
        CHECK(g.limit(vec({-1.5})) == doctest::Approx(6.0));
    }
    SUBCASE("validation") {
        Mat bad(1, 1);
        bad << -1.0;
        CHECK_THROWS_AS(InitialDatum::quadratic(0.0, vec({0.0}), bad).validate(), ModelError);
        Mat skew(2, 2);
        skew << 1.0, 0.5, 0.0, 1.0;
        CHECK_THROWS_AS(InitialDatum::quadratic(0.0, vec({0.0, 0.0}), skew).validate(), ModelError);
        CHECK_THROWS_AS(parse_datum_family("paraboloid"), ConfigError);
        CHECK(parse_datum_family(to_string(DatumFamily::Quadratic)) == DatumFamily::Quadratic);
    }
}

TEST_CASE("search radius grows with the horizon and the compact set") {
    const InitialDatum f = InitialDatum::affine(0.0, vec({1.0}));
    const GrowthBounds g = lagrangian_growth(fixtures::pendulum());
    CHECK(g.quadratic > 0.0);
    CHECK(g.rest >= -1.0 - 1e-9);
    const CompactSet k{vec({0.0}), 1.0};
    const double r1 = search_radius(f, 1.0, g, 0.1, k, 1.0);
    CHECK(r1 > 0.0);
    CHECK(search_radius(f, 1.0, g, 0.1, k, 4.0) >= r1);
    CHECK(search_radius(f, 1.0, g, 0.1, CompactSet{vec({0.0}), 3.0}, 1.0) >= r1);
}

TEST_CASE("Hopf-Lax closed forms for beta = |v|^2 / 2") {
    const QuadraticBeta beta;
    SUBCASE("affine") {
        const InitialDatum f = InitialDatum::affine(0.3, vec({0.8}));
        for (double h : {-1.0, 0.4, 2.0})
            for (double t : {0.25, 1.0, 3.0})
                CHECK(hopf_lax(beta, f, vec({h}), t) == doctest::Approx(0.3 + 0.8 * h - t * 0.32).epsilon(1e-9));
    }
    SUBCASE("cone") {
        const double c = 1.5;
        const InitialDatum f = InitialDatum::cone(c, Norm::L1, 1);
        for (double h : {-2.0, -0.3, 0.0, 1.0, 4.0})
            for (double t : {0.25, 1.0, 2.0}) {
                const double expected = std::abs(h) <= c * t ? h * h / (2 * t) : c * std::abs(h) - c * c * t / 2;
                CHECK(hopf_lax(beta, f, vec({h}), t) == doctest::Approx(expected).epsilon(1e-9));
            }
    }
    SUBCASE("quadratic") {
        Mat Q(1, 1);
        Q << 2.0;
        const double a = 0.5, b = -0.4;
        const InitialDatum f = InitialDatum::quadratic(a, vec({b}), Q);
        for (double h : {-1.0, 0.7})
            for (double t : {0.5, 2.0}) {
                const double q = (h / t - b) / (2.0 + 1.0 / t);
                const double expected = a + b * q + q * q + (h - q) * (h - q) / (2 * t);
                CHECK(hopf_lax(beta, f, vec({h}), t) == doctest::Approx(expected).epsilon(1e-9));
            }
    }
}

TEST_CASE("Lax-Oleinik on covers") {
    SUBCASE("free torus with affine datum is exact") {
        const TorusHamiltonian H = fixtures::free_torus(1);
        const InitialDatum f = InitialDatum::affine(0.1, vec({0.6}));
        for (double eps : {0.5, 0.125}) {
            const double x = 0.37 / eps;
            const auto r = lax_oleinik(H, f, vec({x}), 1.0, eps);
            CHECK(r.value == doctest::Approx(0.1 + 0.6 * 0.37 - 0.18).epsilon(1e-8));
            CHECK(r.radius > 0.0);
        }
    }
    SUBCASE("single loop with constant potential") {
        const GraphCover c = GraphCover::maximal(fixtures::loop(2.0));
        const GraphLagrangian L({0.5});
        const InitialDatum f = InitialDatum::affine(0.0, vec({0.8}));
        const double eps = 0.25, t = 1.0;
        const GraphPoint x = GraphPoint::at_vertex(0, ivec({4}));
        // beta(h) = (2h)^2/2 + 1/2 for the loop of length 2, so u = P h - t (P^2 / 8 - 1/2)
        const double expected = 0.8 * 1.0 - t * (0.64 / 8.0 - 0.5);
        CHECK(lax_oleinik(c, L, f, x, t, eps).value == doctest::Approx(expected).epsilon(1e-6));
    }
    SUBCASE("rescaled Lagrangian gives the same value") {
        const TorusHamiltonian H = fixtures::pendulum();
        const InitialDatum f = InitialDatum::affine(0.0, vec({0.5}));
        LaxOleinikOptions a, b;
        a.mesh = b.mesh = 32;
        b.rescaled_lagrangian = true;
        const double va = lax_oleinik(H, f, vec({2.0}), 1.0, 0.25, a).value;
        const double vb = lax_oleinik(H, f, vec({2.0}), 1.0, 0.25, b).value;
        CHECK(va == doctest::Approx(vb).epsilon(1e-9));
    }
}
