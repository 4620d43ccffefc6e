#include "covhom/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace covhom {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<double>> all_pairs(int n, const std::vector<Edge>& edges, int skip) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
    for (int i = 0; i < n; ++i) d[i][i] = 0.0;
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        if (e == skip) continue;
        const auto& ed = edges[e];
        d[ed.tail][ed.head] = std::min(d[ed.tail][ed.head], ed.length);
        d[ed.head][ed.tail] = std::min(d[ed.head][ed.tail], ed.length);
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}
}  // namespace

MetricGraph::MetricGraph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
    if (vertex_count_ < 1) throw ModelError("graph needs at least one vertex");
    incidence_.resize(vertex_count_);
    for (int e = 0; e < edge_count(); ++e) {
        const auto& ed = edges_[e];
        if (ed.tail < 0 || ed.tail >= vertex_count_ || ed.head < 0 || ed.head >= vertex_count_)
            throw ModelError("edge " + std::to_string(e) + " has an endpoint outside the vertex range");
        if (!(ed.length > 0.0) || !std::isfinite(ed.length))
            throw ModelError("edge " + std::to_string(e) + " must have strictly positive finite length");
        incidence_[ed.tail].push_back({e, true});
        incidence_[ed.head].push_back({e, false});
    }
    build_tree();
    build_metrics();
}

double MetricGraph::min_edge_length() const {
    double m = kInf;
    for (const auto& e : edges_) m = std::min(m, e.length);
    return m;
}

void MetricGraph::build_tree() {
    tree_.assign(edges_.size(), false);
    parent_edge_.assign(vertex_count_, -1);
    depth_.assign(vertex_count_, -1);
    std::queue<int> q;
    q.push(0);
    depth_[0] = 0;
    int visited = 1;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (const auto& inc : incidence_[v]) {
            const auto& ed = edges_[inc.edge];
            const int w = inc.forward ? ed.head : ed.tail;
            if (depth_[w] >= 0) continue;
            depth_[w] = depth_[v] + 1;
            parent_edge_[w] = inc.edge;
            tree_[inc.edge] = true;
            ++visited;
            q.push(w);
        }
    }
    if (visited != vertex_count_) throw ModelError("graph is not connected");

    rank_ = edge_count() - vertex_count_ + 1;
    cocycle_.assign(edges_.size(), IntVec::Zero(rank_));
    int j = 0;
    for (int e = 0; e < edge_count(); ++e) {
        if (tree_[e]) continue;
        cocycle_[e][j++] = 1;
        basis_edges_.push_back(e);
    }

    auto parent_of = [&](int v) {
        const auto& ed = edges_[parent_edge_[v]];
        return ed.tail == v ? ed.head : ed.tail;
    };
    for (int b = 0; b < rank_; ++b) {
        std::vector<int> cycle(edges_.size(), 0);
        const int e = basis_edges_[b];
        cycle[e] += 1;
        // tree path head -> tail closes the cycle
        int u = edges_[e].head, v = edges_[e].tail;
        while (u != v) {
            if (depth_[u] >= depth_[v]) {
                const int pe = parent_edge_[u];
                cycle[pe] += edges_[pe].tail == u ? 1 : -1;  // walking u -> parent
                u = parent_of(u);
            } else {
                const int pe = parent_edge_[v];
                cycle[pe] += edges_[pe].tail == v ? -1 : 1;  // walking parent -> v
                v = parent_of(v);
            }
        }
        cycles_.push_back(std::move(cycle));
    }
}

void MetricGraph::build_metrics() {
    dist_ = all_pairs(vertex_count_, edges_, -1);
    double dmax = 0.0;
    for (const auto& row : dist_)
        for (double d : row) dmax = std::max(dmax, d);
    double lmax = 0.0;
    for (const auto& e : edges_) lmax = std::max(lmax, e.length);
    diameter_ = dmax + lmax;

    min_cycle_ = kInf;
    for (int e = 0; e < edge_count(); ++e) {
        const auto& ed = edges_[e];
        if (ed.tail == ed.head) {
            min_cycle_ = std::min(min_cycle_, ed.length);
            continue;
        }
        const auto d = all_pairs(vertex_count_, edges_, e);
        min_cycle_ = std::min(min_cycle_, ed.length + d[ed.tail][ed.head]);
    }
}

}  // namespace covhom
