#pragma once

#include "covhom/core.hpp"

#include <vector>

namespace covhom {

struct Edge {
    int tail = 0;
    int head = 0;
    double length = 1.0;
};

/// Signed incidence of an edge at a vertex: `forward` means the vertex is the tail.
struct Incidence {
    int edge;
    bool forward;
};

/// Finite connected metric graph with a breadth-first spanning tree from vertex 0
/// and the induced integer cocycle basis: the j-th non-tree edge (in index order)
/// carries the j-th standard basis vector of Z^k, tree edges carry 0.
class MetricGraph {
public:
    MetricGraph(int vertex_count, std::vector<Edge> edges);

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(int e) const { return edges_.at(e); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Incidence>& incidences(int vertex) const { return incidence_[vertex]; }

    /// Cycle-space dimension k = |E| - |V| + 1.
    int rank() const { return rank_; }
    bool is_tree_edge(int e) const { return tree_[e]; }
    const IntVec& cocycle(int e) const { return cocycle_[e]; }
    /// Non-tree edge carrying basis vector j.
    int basis_edge(int j) const { return basis_edges_[j]; }

    /// Signed edge multiplicities of the fundamental cycle of basis vector j.
    const std::vector<int>& fundamental_cycle(int j) const { return cycles_[j]; }

    /// Upper bound on the diameter of the base metric graph (interior points included).
    double diameter() const { return diameter_; }
    /// Length of the shortest closed walk with nonzero homology.
    double min_cycle_length() const { return min_cycle_; }
    double min_edge_length() const;
    /// Shortest-path distances between base vertices.
    double vertex_distance(int u, int v) const { return dist_[u][v]; }

private:
    void build_tree();
    void build_metrics();

    int vertex_count_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> incidence_;
    std::vector<bool> tree_;
    std::vector<int> parent_edge_;
    std::vector<int> depth_;
    std::vector<IntVec> cocycle_;
    std::vector<int> basis_edges_;
    std::vector<std::vector<int>> cycles_;
    std::vector<std::vector<double>> dist_;
    int rank_ = 0;
    double diameter_ = 0.0;
    double min_cycle_ = 0.0;
};

}  // namespace covhom
