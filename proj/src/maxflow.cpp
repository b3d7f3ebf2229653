#include "magneto/maxflow.hpp"

#include <limits>
#include <queue>

namespace magneto {

MaxFlow::MaxFlow(int n_nodes) : adj_(n_nodes), level_(n_nodes), iter_(n_nodes) {}

int MaxFlow::add_edge(int from, int to, double cap) {
    const int idx = static_cast<int>(adj_[from].size());
    adj_[from].push_back({to, cap, static_cast<int>(adj_[to].size())});
    adj_[to].push_back({from, 0.0, idx});
    return idx;
}

bool MaxFlow::bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (const Edge& e : adj_[v]) {
            if (e.cap > 0.0 && level_[e.to] < 0) {
                level_[e.to] = level_[v] + 1;
                q.push(e.to);
            }
        }
    }
    return level_[sink] >= 0;
}

double MaxFlow::dfs(int v, int sink, double pushed) {
    if (v == sink) return pushed;
    for (int& i = iter_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
        Edge& e = adj_[v][i];
        if (e.cap > 0.0 && level_[v] < level_[e.to]) {
            const double got = dfs(e.to, sink, std::min(pushed, e.cap));
            if (got > 0.0) {
                e.cap -= got;
                adj_[e.to][e.rev].cap += got;
                return got;
            }
        }
    }
    return 0.0;
}

double MaxFlow::solve(int source, int sink) {
    double flow = 0.0;
    while (bfs(source, sink)) {
        std::fill(iter_.begin(), iter_.end(), 0);
        while (true) {
            const double got = dfs(source, sink, std::numeric_limits<double>::infinity());
            if (got <= 0.0) break;
            flow += got;
        }
    }
    return flow;
}

std::vector<bool> MaxFlow::min_cut_source_side(int source) const {
    std::vector<bool> side(adj_.size(), false);
    std::queue<int> q;
    side[source] = true;
    q.push(source);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (const Edge& e : adj_[v]) {
            if (e.cap > 0.0 && !side[e.to]) {
                side[e.to] = true;
                q.push(e.to);
            }
        }
    }
    return side;
}

}  // namespace magneto
