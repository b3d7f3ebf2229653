#pragma once

#include <vector>

namespace magneto {

/// Dinic max-flow (BFS level graph + blocking flow) with double capacities.
/// Deterministic: edges are explored in insertion order.
class MaxFlow {
  public:
    explicit MaxFlow(int n_nodes);

    /// Adds a directed edge; a zero-capacity reverse edge is created for the
    /// residual graph. Returns the edge index.
    int add_edge(int from, int to, double cap);

    double solve(int source, int sink);

    /// After solve: nodes still reachable from the source in the residual
    /// graph (the source side of a minimum cut).
    std::vector<bool> min_cut_source_side(int source) const;

  private:
    struct Edge {
        int to;
        double cap;
        int rev;  // index of the reverse edge in adj_[to]
    };

    bool bfs(int source, int sink);
    double dfs(int v, int sink, double pushed);

    std::vector<std::vector<Edge>> adj_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

}  // namespace magneto
