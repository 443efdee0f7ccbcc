#include "maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace graphon::detail {

void MaxFlow::add_edge(int u, int v, double cap) {
    Arc fwd{v, static_cast<int>(graph_[v].size()), cap};
    Arc bwd{u, static_cast<int>(graph_[u].size()), 0.0};
    graph_[u].push_back(fwd);
    graph_[v].push_back(bwd);
}

bool MaxFlow::bfs(int source, int sink) {
    level_.assign(graph_.size(), -1);
    std::queue<int> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const Arc& a : graph_[v]) {
            if (a.cap > kFlowEps && level_[a.to] < 0) {
                level_[a.to] = level_[v] + 1;
                q.push(a.to);
            }
        }
    }
    return level_[sink] >= 0;
}

double MaxFlow::dfs(int v, int sink, double pushed) {
    if (v == sink) return pushed;
    for (int& i = iter_[v]; i < static_cast<int>(graph_[v].size()); ++i) {
        Arc& a = graph_[v][i];
        if (a.cap <= kFlowEps || level_[a.to] != level_[v] + 1) continue;
        double got = dfs(a.to, sink, std::min(pushed, a.cap));
        if (got > kFlowEps) {
            a.cap -= got;
            graph_[a.to][a.rev].cap += got;
            return got;
        }
    }
    level_[v] = -1;
    return 0.0;
}

double MaxFlow::run(int source, int sink) {
    double total = 0.0;
    while (bfs(source, sink)) {
        iter_.assign(graph_.size(), 0);
        while (true) {
            double got = dfs(source, sink, std::numeric_limits<double>::infinity());
            if (got <= kFlowEps) break;
            total += got;
        }
    }
    return total;
}

}  // namespace graphon::detail
