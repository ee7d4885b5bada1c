#include "fine/geodesic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include "fine/errors.hpp"
#include "fine/text_io.hpp"
#include "fine/threading.hpp"

namespace fine {

namespace {

/// Plain union-find over node indices.
class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(static_cast<size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[static_cast<size_t>(x)] != x) {
            parent_[static_cast<size_t>(x)] = parent_[static_cast<size_t>(parent_[static_cast<size_t>(x)])];
            x = parent_[static_cast<size_t>(x)];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
        return true;
    }

private:
    std::vector<int> parent_;
};

int component_count(int n, const std::vector<GraphEdge>& edges, DisjointSets& sets) {
    for (const GraphEdge& e : edges) sets.unite(e.i, e.j);
    int components = 0;
    for (int i = 0; i < n; ++i)
        if (sets.find(i) == i) ++components;
    return components;
}

std::vector<std::vector<std::pair<int, double>>> adjacency(const NeighborGraph& g) {
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(g.n_nodes));
    for (const GraphEdge& e : g.edges) {
        adj[static_cast<size_t>(e.i)].emplace_back(e.j, e.weight);
        adj[static_cast<size_t>(e.j)].emplace_back(e.i, e.weight);
    }
    return adj;
}

}  // namespace

int default_graph_k(int n_nodes) {
    const int log_k = n_nodes > 1 ? std::bit_width(static_cast<unsigned>(n_nodes - 1)) : 1;
    const int k = std::max(3, log_k);
    return std::max(1, std::min(n_nodes - 1, k));
}

NeighborGraph build_neighbor_graph(const DissimilarityMatrix& d, int k) {
    const int n = d.size();
    if (k < 1 || k > n - 1)
        throw InvalidParameterError("build_neighbor_graph: k=" + std::to_string(k) +
                                    " outside [1, " + std::to_string(n - 1) + "]");
    std::set<std::pair<int, int>> selected;
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        order.clear();
        for (int j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double da = d.values(i, a);
            const double db = d.values(i, b);
            if (da != db) return da < db;
            return a < b;
        });
        for (int t = 0; t < k; ++t) {
            const int j = order[static_cast<size_t>(t)];
            selected.emplace(std::min(i, j), std::max(i, j));
        }
    }
    NeighborGraph g;
    g.n_nodes = n;
    g.k = k;
    g.edges.reserve(selected.size());
    for (const auto& [i, j] : selected) g.edges.push_back({i, j, d.values(i, j)});
    DisjointSets sets(n);
    g.connected = component_count(n, g.edges, sets) == 1;
    return g;
}

NeighborGraph ensure_connected(const NeighborGraph& g, const DissimilarityMatrix& d,
                               int* added_edges) {
    if (added_edges != nullptr) *added_edges = 0;
    if (g.connected) return g;
    if (d.size() != g.n_nodes)
        throw InvalidParameterError("ensure_connected: matrix size does not match graph");
    NeighborGraph out = g;
    DisjointSets sets(g.n_nodes);
    int components = component_count(g.n_nodes, g.edges, sets);
    int added = 0;
    while (components > 1) {
        int best_i = -1;
        int best_j = -1;
        double best_w = std::numeric_limits<double>::infinity();
        for (int i = 0; i < g.n_nodes; ++i) {
            for (int j = i + 1; j < g.n_nodes; ++j) {
                if (sets.find(i) == sets.find(j)) continue;
                const double w = d.values(i, j);
                if (w < best_w) {
                    best_w = w;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        out.edges.push_back({best_i, best_j, best_w});
        sets.unite(best_i, best_j);
        --components;
        ++added;
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    });
    out.connected = true;
    if (added_edges != nullptr) *added_edges = added;
    return out;
}

DissimilarityMatrix geodesic_distances(const NeighborGraph& g, const std::vector<std::string>& ids,
                                       Metric metric, int threads) {
    if (!g.connected) throw DisconnectedGraphError("geodesic_distances: graph is not connected");
    const int n = g.n_nodes;
    if (static_cast<int>(ids.size()) != n)
        throw InvalidParameterError("geodesic_distances: id count does not match graph");
    const auto adj = adjacency(g);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    parallel_for(n, threads, [&](int source) {
        std::vector<double> best(static_cast<size_t>(n), kInf);
        std::vector<bool> done(static_cast<size_t>(n), false);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
        best[static_cast<size_t>(source)] = 0.0;
        heap.emplace(0.0, source);
        while (!heap.empty()) {
            const auto [w, u] = heap.top();
            heap.pop();
            if (done[static_cast<size_t>(u)]) continue;
            done[static_cast<size_t>(u)] = true;
            for (const auto& [v, ew] : adj[static_cast<size_t>(u)]) {
                const double cand = w + ew;
                if (cand < best[static_cast<size_t>(v)]) {
                    best[static_cast<size_t>(v)] = cand;
                    heap.emplace(cand, v);
                }
            }
        }
        for (int j = 0; j < n; ++j) dist(source, j) = best[static_cast<size_t>(j)];
    });

    DissimilarityMatrix out;
    out.metric = metric;
    out.ids = ids;
    out.values = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = dist(i, j);
            if (!std::isfinite(v))
                throw DisconnectedGraphError("geodesic_distances: unreachable node pair (" +
                                             std::to_string(i) + "," + std::to_string(j) + ")");
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
    }
    out.validate();
    return out;
}

void save_graph_csv(const NeighborGraph& g, const std::string& path) {
    std::ostringstream out;
    out << "i,j,weight\n";
    for (const GraphEdge& e : g.edges)
        out << e.i << ',' << e.j << ',' << format_double(e.weight) << '\n';
    write_file(path, out.str());
}

}  // namespace fine
