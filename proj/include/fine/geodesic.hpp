#pragma once

#include <string>
#include <vector>

#include "fine/divergence.hpp"

namespace fine {

struct GraphEdge {
    int i = 0;  // i < j always
    int j = 0;
    double weight = 0.0;
};

/// Undirected weighted neighbor graph; each edge stored once with i < j.
struct NeighborGraph {
    int n_nodes = 0;
    std::vector<GraphEdge> edges;
    int k = 0;
    bool connected = false;
};

/// max(3, ceil(log2(n))) clamped into the valid [1, n-1] range.
int default_graph_k(int n_nodes);

/// Symmetric-union kNN graph: edge (i,j) exists when j is among the k nearest
/// of i or i among the k nearest of j. Distance ties break toward the lower
/// index. k outside [1, N-1] raises InvalidParameterError.
NeighborGraph build_neighbor_graph(const DissimilarityMatrix& d, int k);

/// Joins a fragmented graph by repeatedly adding the globally minimal-weight
/// edge between two distinct components (ties toward lower (i,j)).
/// *added_edges reports how many bridges were inserted.
NeighborGraph ensure_connected(const NeighborGraph& g, const DissimilarityMatrix& d,
                               int* added_edges = nullptr);

/// All-pairs shortest-path lengths via one Dijkstra run per source node.
/// The upper triangle is computed and mirrored, so the result is exactly
/// symmetric. ids and metric carry over from the matrix the graph came from.
DissimilarityMatrix geodesic_distances(const NeighborGraph& g, const std::vector<std::string>& ids,
                                       Metric metric, int threads = 1);

/// Writes the edge list as CSV rows `i,j,weight` with a header line.
void save_graph_csv(const NeighborGraph& g, const std::string& path);

}  // namespace fine
