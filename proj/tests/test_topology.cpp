#include "doctest.h"
#include "fixtures.hpp"

#include <map>
#include <queue>
#include <random>

using namespace covhom;
using fixtures::ivec;
using fixtures::vec;

namespace {

// Dijkstra on the lattice of (vertex, sheet) pairs within an l_inf window of sheets.
double lattice_distance(const GraphCover& cover, int v0, const IntVec& s0, int v1, const IntVec& s1, int window) {
    using Key = std::pair<int, std::vector<std::int64_t>>;
    auto key = [](int v, const IntVec& s) { return Key{v, std::vector<std::int64_t>(s.data(), s.data() + s.size())}; };
    std::map<Key, double> dist;
    using Item = std::pair<double, Key>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[key(v0, s0)] = 0.0;
    queue.push({0.0, key(v0, s0)});
    const auto& g = cover.graph();
    while (!queue.empty()) {
        auto [d, k] = queue.top();
        queue.pop();
        if (d > dist[k]) continue;
        IntVec sheet(static_cast<Eigen::Index>(k.second.size()));
        for (std::size_t i = 0; i < k.second.size(); ++i) sheet[static_cast<Eigen::Index>(i)] = k.second[i];
        if (k.first == v1 && sheet == s1) return d;
        for (int e = 0; e < g.edge_count(); ++e) {
            const auto& ed = g.edge(e);
            auto relax = [&](int to, const IntVec& ts) {
                if (ts.size() > 0 && ts.cwiseAbs().maxCoeff() > window) return;
                const Key nk = key(to, ts);
                const double nd = d + ed.length;
                auto it = dist.find(nk);
                if (it == dist.end() || nd < it->second) {
                    dist[nk] = nd;
                    queue.push({nd, nk});
                }
            };
            if (ed.tail == k.first) relax(ed.head, IntVec(sheet + cover.shift(e)));
            if (ed.head == k.first) relax(ed.tail, IntVec(sheet - cover.shift(e)));
        }
    }
    return INFINITY;
}

GraphPoint random_point(const GraphCover& cover, std::mt19937_64& rng, int window) {
    const auto& g = cover.graph();
    std::uniform_int_distribution<int> pe(0, g.edge_count() - 1), ps(-window, window);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const int e = pe(rng);
    IntVec sheet(cover.rank());
    for (int i = 0; i < cover.rank(); ++i) sheet[i] = ps(rng);
    return GraphPoint::on_edge(e, u(rng) * g.edge(e).length, sheet);
}

}  // namespace

TEST_CASE("cycle rank and structural errors") {
    CHECK(fixtures::loop(1.0)->rank() == 1);
    CHECK(fixtures::figure_eight()->rank() == 2);
    CHECK(fixtures::theta()->rank() == 2);
    CHECK(MetricGraph(2, {{0, 1, 1.0}}).rank() == 0);
    CHECK_THROWS_AS(MetricGraph(3, {{0, 1, 1.0}}), ModelError);
    CHECK_THROWS_AS(MetricGraph(1, {{0, 0, -1.0}}), ModelError);
    CHECK_THROWS_AS(MetricGraph(1, {{0, 0, 0.0}}), ModelError);
    CHECK_THROWS_AS(MetricGraph(1, {{0, 2, 1.0}}), ModelError);
}

TEST_CASE("fundamental cycles integrate the cocycle basis") {
    for (const auto& g : {fixtures::figure_eight(), fixtures::theta()}) {
        for (int j = 0; j < g->rank(); ++j) {
            IntVec sum = IntVec::Zero(g->rank());
            const auto& cycle = g->fundamental_cycle(j);
            REQUIRE(static_cast<int>(cycle.size()) == g->edge_count());
            for (int e = 0; e < g->edge_count(); ++e) sum += cycle[e] * g->cocycle(e);
            IntVec unit = IntVec::Zero(g->rank());
            unit[j] = 1;
            CHECK(sum == unit);
            // closed: net flow at each vertex vanishes
            for (int v = 0; v < g->vertex_count(); ++v) {
                int net = 0;
                for (int e = 0; e < g->edge_count(); ++e) {
                    if (g->edge(e).tail == v) net -= cycle[e];
                    if (g->edge(e).head == v) net += cycle[e];
                }
                CHECK(net == 0);
            }
        }
    }
}

TEST_CASE("torus cover distance") {
    const TorusCover c{1};
    CHECK(cover_distance(c, vec({0.25}), vec({4.75})) == doctest::Approx(4.5));
    CHECK(c.lipschitz(Norm::L2) == 1.0);
    CHECK((f_eps(c, vec({3.0}), 0.25) - vec({0.75})).norm() == 0.0);
}

TEST_CASE("graph cover distances against lattice Dijkstra") {
    {
        const GraphCover c = GraphCover::maximal(fixtures::loop(2.0));
        CHECK(cover_distance(c, c.base_point(), GraphPoint::at_vertex(0, ivec({3}))) == doctest::Approx(6.0));
        CHECK(cover_distance(c, GraphPoint::on_edge(0, 0.5, ivec({0})), GraphPoint::at_vertex(0, ivec({2}))) ==
              doctest::Approx(3.5));
    }
    for (const auto& g : {fixtures::figure_eight(1.0, 2.0), fixtures::theta()}) {
        const GraphCover c = GraphCover::maximal(g);
        for (int v = 0; v < g->vertex_count(); ++v)
            for (const IntVec& s : {ivec({2, -1}), ivec({-3, 0}), ivec({1, 3}), ivec({0, 0})}) {
                const double oracle = lattice_distance(c, 0, ivec({0, 0}), v, s, 8);
                CHECK(cover_distance(c, c.base_point(), GraphPoint::at_vertex(v, s)) ==
                      doctest::Approx(oracle).epsilon(1e-12));
            }
    }
}

TEST_CASE("cover metric: deck equivariance, symmetry, triangle inequality, Lipschitz G") {
    std::mt19937_64 rng(5);
    for (const auto& g : {fixtures::figure_eight(1.0, 1.5), fixtures::theta()}) {
        const GraphCover c = GraphCover::maximal(g);
        const double k0 = c.lipschitz(Norm::L1);
        for (int i = 0; i < 20; ++i) {
            const GraphPoint x = random_point(c, rng, 3), y = random_point(c, rng, 3), z = random_point(c, rng, 3);
            const IntVec shift = ivec({i % 3 - 1, 2 - i % 5});
            const double dxy = cover_distance(c, x, y);
            CHECK(cover_distance(c, c.translate(x, shift), c.translate(y, shift)) == doctest::Approx(dxy).epsilon(1e-12));
            CHECK(cover_distance(c, y, x) == doctest::Approx(dxy).epsilon(1e-12));
            CHECK(cover_distance(c, x, z) <= dxy + cover_distance(c, y, z) + 1e-9);
            CHECK(norm(c.g_map(x) - c.g_map(y), Norm::L1) <= k0 * dxy + 1e-12);
            CHECK(norm(c.g_map(c.translate(x, shift)) - c.g_map(x) - shift.cast<double>(), Norm::LInf) < 1e-12);
        }
    }
}

TEST_CASE("Smith normal form") {
    IntMat a(2, 2);
    a << 2, 4, 6, 8;
    const SmithForm s = smith_normal_form(a);
    CHECK(s.left * a * s.right == s.diagonal);
    CHECK(std::abs(s.left.cast<double>().determinant()) == doctest::Approx(1.0));
    CHECK(std::abs(s.right.cast<double>().determinant()) == doctest::Approx(1.0));
    REQUIRE(s.invariant_factors.size() == 2);
    CHECK(s.invariant_factors[0] == 2);
    CHECK(s.invariant_factors[1] == 4);

    IntMat f(1, 3);
    f << 2, 3, 4;
    const SmithForm t = smith_normal_form(f);
    CHECK(t.left * f * t.right == t.diagonal);
    CHECK(t.invariant_factors == std::vector<std::int64_t>{1});
}

TEST_CASE("subcover maps") {
    IntMat f(1, 2);
    f << 1, 1;
    const SubcoverMap sub(f, Norm::L1);
    CHECK(sub.invariant_factors() == std::vector<std::int64_t>{1});
    REQUIRE(sub.kernel_basis().cols() == 1);
    CHECK((f * sub.kernel_basis()).isZero());
    CHECK(sub.kernel_basis().cwiseAbs() == (IntMat(2, 1) << 1, 1).finished());
    CHECK(sub.apply(ivec({2, 1})) == ivec({3}));
    CHECK(sub.pullback(vec({0.5})) == vec({0.5, 0.5}));
    CHECK(sub.apply(sub.lift_sheet(ivec({-4}))) == ivec({-4}));
    // kernel lattice (n, -n) covers the line (t, -t) within l1 distance 1
    CHECK(sub.density_constant() == doctest::Approx(1.0));
    CHECK(sub.quotient_norm(vec({3.0})) == doctest::Approx(3.0));

    IntMat bad(1, 2);
    bad << 2, 0;
    CHECK_THROWS_AS(SubcoverMap(bad, Norm::L1), ModelError);
    IntMat tall(2, 1);
    tall << 1, 1;
    CHECK_THROWS_AS(SubcoverMap(tall, Norm::L1), ModelError);
}

TEST_CASE("quotient cover of the figure-eight") {
    const auto g = fixtures::figure_eight();
    const GraphCover maximal = GraphCover::maximal(g);
    IntMat f(1, 2);
    f << 1, 1;
    const SubcoverMap sub(f, Norm::L1);
    const GraphCover quotient = sub.quotient(maximal);
    CHECK(quotient.rank() == 1);
    CHECK(subcover_project(sub, GraphPoint::at_vertex(0, ivec({2, 1}))).sheet == ivec({3}));
    CHECK(subcover_project(sub, GraphPoint::at_vertex(0, ivec({0, 3}))).sheet == ivec({3}));

    std::mt19937_64 rng(9);
    for (int i = 0; i < 10; ++i) {
        const GraphPoint x = random_point(maximal, rng, 3);
        const GraphPoint xh = subcover_project(sub, x);
        CHECK((ghat_map(sub, quotient, xh) - sub.apply(maximal.g_map(x))).norm() < 1e-12);
    }

    // brute force over translates (n, -n), |n| <= 3
    const GraphPoint x0 = quotient.base_point();
    for (std::int64_t q : {0, 1, 2, -3}) {
        const GraphPoint yh = GraphPoint::at_vertex(0, ivec({q}));
        const IntVec lift = sub.lift_sheet(ivec({q}));
        double oracle = INFINITY;
        for (int n = -3; n <= 3; ++n)
            oracle = std::min(oracle, cover_distance(maximal, maximal.base_point(),
                                                     GraphPoint::at_vertex(0, IntVec(lift + ivec({n, -n})))));
        CHECK(quotient_distance(sub, maximal, x0, yh) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(quotient_distance(sub, maximal, x0, yh) == doctest::Approx(std::abs(static_cast<double>(q))));
    }
    // the translate (1, -1) of the base point sits at distance 2 in the maximal cover
    CHECK(cover_distance(maximal, maximal.base_point(), GraphPoint::at_vertex(0, ivec({1, -1}))) ==
          doctest::Approx(2.0));

    IntMat proj(1, 2);
    proj << 1, 0;
    const SubcoverMap p(proj);
    const GraphCover pq = p.quotient(maximal);
    CHECK(ghat_map(p, pq, subcover_project(p, GraphPoint::at_vertex(0, ivec({4, -7})))) == vec({4.0}));
}

TEST_CASE("identity subcover reproduces the maximal cover") {
    const auto g = fixtures::theta();
    const GraphCover maximal = GraphCover::maximal(g);
    const SubcoverMap id(IntMat::Identity(2, 2));
    const GraphCover q = id.quotient(maximal);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        const GraphPoint x = random_point(maximal, rng, 2), y = random_point(maximal, rng, 2);
        CHECK(quotient_distance(id, maximal, subcover_project(id, x), subcover_project(id, y)) ==
              doctest::Approx(cover_distance(maximal, x, y)).epsilon(1e-12));
        CHECK((q.g_map(subcover_project(id, x)) - maximal.g_map(x)).norm() < 1e-12);
    }
}

TEST_CASE("space convergence") {
    std::vector<double> eps;
    for (int j = 0; j <= 5; ++j) eps.push_back(std::ldexp(1.0, -j));
    const auto flat = estimate_space_convergence(TorusCover{2}, eps, Norm::L2, SpaceSampling{});
    CHECK(flat.k_constant == 1.0);
    for (double a : flat.a_eps) CHECK(a == 0.0);
    CHECK(flat.pass);

    const auto fe = estimate_space_convergence(GraphCover::maximal(fixtures::figure_eight()), eps, Norm::L1,
                                               SpaceSampling{});
    for (std::size_t i = 0; i < eps.size(); ++i) {
        CHECK(fe.a_over_eps[i] == doctest::Approx(fe.a_over_eps.front()).epsilon(1e-9));
        CHECK(fe.a_over_eps[i] <= 2.0);
    }
    CHECK(fe.covering_radius.back() < fe.covering_radius.front() / 16);

    std::vector<double> up = {0.25, 0.5};
    CHECK_THROWS(estimate_space_convergence(TorusCover{1}, up, Norm::L2, SpaceSampling{}));
}
