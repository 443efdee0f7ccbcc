#pragma once

#include <vector>

namespace graphon::detail {

// Dinic max-flow with double capacities. Augmenting paths below kFlowEps are
// treated as exhausted so floating-point residue cannot stall a phase.
class MaxFlow {
  public:
    static constexpr double kFlowEps = 1e-15;

    explicit MaxFlow(int n) : graph_(n) {}

    void add_edge(int u, int v, double cap);
    double run(int source, int sink);

  private:
    struct Arc {
        int to;
        int rev;
        double cap;
    };

    bool bfs(int source, int sink);
    double dfs(int v, int sink, double pushed);

    std::vector<std::vector<Arc>> graph_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

}  // namespace graphon::detail
