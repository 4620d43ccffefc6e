#include "doctest.h"
#include "fixtures.hpp"

#include "covhom/config.hpp"

#include <cmath>

using namespace covhom;
using fixtures::ivec;
using fixtures::vec;

namespace {

Scenario load(const std::string& name) {
    return load_config(std::string(COVHOM_SOURCE_DIR) + "/configs/" + name + ".json").scenario;
}

std::string failing_path(const Scenario& s) {
    try {
        s.validate();
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

}  // namespace

TEST_CASE("rate fit") {
    const std::vector<double> eps = {1.0, 0.5, 0.25, 0.125, 0.0625};
    std::vector<double> err;
    for (double e : eps) err.push_back(3.0 * std::pow(e, 1.5));
    const RateFit fit = fit_rate(eps, err);
    CHECK(fit.defined);
    CHECK_FALSE(fit.exact);
    CHECK(fit.rate == doctest::Approx(1.5));
    CHECK(fit.constant == doctest::Approx(3.0));
    CHECK(fit.residual < 1e-12);

    const RateFit zero = fit_rate(eps, std::vector<double>(eps.size(), 0.0));
    CHECK(zero.exact);
    CHECK_FALSE(fit_rate({1.0}, {0.1}).defined);
}

TEST_CASE("matching on the torus rounds ties down") {
    TorusMatch m = match_torus(vec({0.5}), 1.0, 1);
    CHECK(m.x[0] == 0.0);
    CHECK(m.error == doctest::Approx(0.5));
    m = match_torus(vec({-0.5}), 1.0, 1);
    CHECK(m.x[0] == -1.0);
    m = match_torus(vec({1.0 / 3.0, -0.2}), 0.125, 8);
    CHECK((0.125 * m.x - vec({1.0 / 3.0, -0.2})).norm() == doctest::Approx(m.error));
    CHECK(m.error <= std::sqrt(2.0) * 0.125 / 16 + 1e-15);
}

TEST_CASE("matching on graph covers") {
    const GraphCover c = GraphCover::maximal(fixtures::figure_eight(1.0, 1.5));
    for (double eps : {0.5, 0.1}) {
        const Vec h = vec({0.37, -0.81});
        const GraphMatch m = match_graph(c, h, eps, 16);
        CHECK((eps * c.g_map(m.x) - h).norm() == doctest::Approx(m.error).epsilon(1e-12));
        CHECK(m.error <= eps * 0.5 + 1e-12);
    }
    const GraphMatch exact = match_graph(c, vec({2.0, 1.0}), 0.5, 4);
    CHECK(exact.error == doctest::Approx(0.0));
    CHECK(exact.x.sheet == ivec({4, 2}));
    CHECK(describe(exact.x).find("4") != std::string::npos);
}

TEST_CASE("scenario validation reports field paths") {
    const Scenario base = load("free_torus_1d");
    CHECK(failing_path(base).empty());

    Scenario s = base;
    s.epsilons = {0.5, 0.5};
    CHECK(failing_path(s) == "experiment.epsilons[1]");
    s = base;
    s.epsilons = {1.0, -0.5};
    CHECK(failing_path(s) == "experiment.epsilons[1]");
    s = base;
    s.points[0].h = vec({0.1, 0.2});
    CHECK(failing_path(s) == "experiment.points[0].h");
    s = base;
    s.points[0].t = 0.0;
    CHECK(failing_path(s) == "experiment.points[0].t");
    s = base;
    s.lax.mesh = 1;
    CHECK(failing_path(s) == "compute.mesh");
    s = base;
    s.datum = InitialDatum::affine(0.0, vec({1.0, 1.0}));
    CHECK(failing_path(s) == "datum");
    s = base;
    IntMat f(1, 1);
    f << 1;
    s.subcover = f;
    CHECK(failing_path(s) == "cover.subcover");
}

TEST_CASE("cover datum convergence") {
    InitialDatum f = InitialDatum::affine(0.1, vec({0.7}));
    f.perturbation = 0.3;
    const std::vector<double> eps = {1.0, 0.5, 0.25};
    const CompactSet k{vec({0.0}), 1.0};
    const DatumConvergence t = function_convergence_check(f, TorusCover{1}, eps, k, 32, 4, 0.5);
    REQUIRE(t.residual.size() == 3);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(t.residual[i] <= 0.3 * eps[i] + 1e-12);
    CHECK(t.residual.back() < t.residual.front());
    CHECK(t.pass);

    const DatumConvergence g =
        function_convergence_check(f, GraphCover::maximal(fixtures::loop(1.0)), eps, k, 32, 4, 1e-3);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(g.residual[i] <= 0.3 * eps[i] + 1e-12);
    CHECK_FALSE(g.pass);
}

TEST_CASE("effective functions by system") {
    const Scenario loop = load("single_loop");
    const auto alpha = make_alpha(loop.system, loop.minimax);
    const auto beta = make_beta(loop.system, loop.beta_grid, loop.minimax);
    CHECK((*alpha)(vec({0.8})) == doctest::Approx(0.64 / 8 - 0.5));
    CHECK((*beta)(vec({0.25})) == doctest::Approx(2.0 * 0.0625 + 0.5));

    const Scenario free = load("free_torus_1d");
    CHECK((*make_alpha(free.system, free.minimax))(vec({1.5})) == doctest::Approx(1.125));
    CHECK((*make_beta(free.system, free.beta_grid, free.minimax))(vec({-2.0})) == doctest::Approx(2.0));
}

TEST_CASE("free torus experiment is exact") {
    const Scenario s = load("free_torus_1d");
    const ExperimentReport r = run_experiment(s);
    CHECK(r.pass);
    CHECK(r.rows.size() == s.epsilons.size() * s.points.size());
    for (const auto& row : r.rows) {
        CHECK(row.u_limit == doctest::Approx(0.2 + 1.5 / 3.0 - 1.125));
        CHECK(row.abs_error == doctest::Approx(std::abs(row.v_eps - row.u_limit)));
        // the only error left is the slope times the matching offset
        CHECK(row.abs_error == doctest::Approx(1.5 * row.matching_error).epsilon(1e-9));
    }
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].pass);
}

TEST_CASE("single loop experiment converges") {
    const Scenario s = load("single_loop");
    const ExperimentReport r = run_experiment(s);
    CHECK(r.pass);
    CHECK(r.points[0].final_error < r.threshold);
    CHECK(r.points[0].monotone);
    CHECK(r.datum.pass);
    CHECK(r.spaces.pass);

    const AffineCheckReport a = affine_datum_check(s, vec({0.8}), 0.0);
    CHECK(a.alpha == doctest::Approx(0.64 / 8 - 0.5));
    for (const auto& row : a.rows) CHECK(row.deviation <= a.max_deviation + 1e-15);
    CHECK(a.max_deviation < 1e-6);
}

TEST_CASE("subcover experiment on the figure-eight") {
    const Scenario s = load("figure_eight_subcover");
    const ExperimentReport r = run_subcover_experiment(s);
    REQUIRE(r.subcover);
    CHECK(r.subcover->lift_pass);
    CHECK(r.subcover->invariance_pass);
    CHECK(r.subcover->duality_pass);
    CHECK(r.pass);
    CHECK_THROWS_AS(run_subcover_experiment(load("single_loop")), ConfigError);
}
