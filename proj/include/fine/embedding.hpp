#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fine/density.hpp"
#include "fine/divergence.hpp"
#include "fine/geodesic.hpp"

namespace fine {

enum class EmbedMethod { cmds, lem, ccdr, pca };

std::string embed_method_name(EmbedMethod m);
EmbedMethod embed_method_from_name(const std::string& name);

/// Parameters for the Laplacian-eigenmap family.
/// heat_t semantics: 0 means auto (mean of squared graph-edge dissimilarities),
/// +infinity means unit weights for every edge, any other positive value is the
/// heat-kernel scale itself.
struct LemParams {
    int k_neighbors = 0;  // 0 picks default_graph_k(N)
    double heat_t = 0.0;
    double label_weight_beta = 0.0;
};

struct Embedding {
    Eigen::MatrixXd coords;        // N x dim
    std::vector<double> spectrum;  // eigenvalue backing each coordinate axis
    EmbedMethod method = EmbedMethod::cmds;
    std::vector<std::string> ids;  // row order matches the source matrix

    // resolved parameters, recorded so the sidecar can reproduce the run
    int dim = 0;
    int graph_k = 0;    // lem/ccdr only
    double heat_t = 0;  // lem/ccdr only, post-resolution value
    double beta = 0.0;  // ccdr only

    double negative_eigen_mass = 0.0;  // cmds: sum|lambda<0| / sum|lambda|
    int zero_padded_dims = 0;          // axes zeroed for lack of spectrum
};

/// Classical MDS: eigendecomposition of -1/2 H D^2 H. Axes whose eigenvalue is
/// not positive are zero-filled and counted in zero_padded_dims; the share of
/// negative eigenvalue mass lands in negative_eigen_mass.
Embedding classical_mds(const DissimilarityMatrix& d_matrix, int dim);

/// Laplacian eigenmaps on a prebuilt neighbor graph (must be connected;
/// callers bridge fragmented graphs beforehand).
Embedding laplacian_eigenmaps(const NeighborGraph& graph, const std::vector<std::string>& ids,
                              int dim, const LemParams& params);

/// Convenience overload that builds the kNN adjacency graph itself and throws
/// DisconnectedGraphError if it fragments.
Embedding laplacian_eigenmaps(const DissimilarityMatrix& d_matrix, int dim,
                              const LemParams& params);

/// LEM with same-label weight augmentation: W'_ij = W_ij + beta when both
/// labels are present and equal. beta = 0 runs the plain LEM path unchanged,
/// bit for bit. Unlabeled rows simply receive no augmentation.
Embedding ccdr(const NeighborGraph& graph, const std::vector<std::string>& ids,
               const std::vector<std::optional<int>>& labels, int dim, const LemParams& params);

Embedding ccdr(const DissimilarityMatrix& d_matrix, const std::vector<std::optional<int>>& labels,
               int dim, const LemParams& params);

/// PCA of row vectors: center, eigendecompose the sample covariance, project
/// onto the top-dim axes. Axes past the numerical rank are zero-filled.
Embedding pca_embed(const Eigen::MatrixXd& vectors, const std::vector<std::string>& ids, int dim);

/// Euclidean k-nearest-neighbor vote. Ties break by smaller mean distance to
/// the tied class among the k neighbors, then by smaller label id.
std::vector<int> knn_classify(const Eigen::MatrixXd& train_coords,
                              const std::vector<int>& train_labels,
                              const Eigen::MatrixXd& test_coords, int k);

/// Heat-kernel similarity on the multinomial sphere:
/// (4 pi t)^(n/2) * exp(-arccos^2(sum sqrt(p q)) / t).
/// positive_prefactor_exponent = false flips the prefactor exponent to -n/2.
double diffusion_kernel_multinomial(const MultinomialPdf& p, const MultinomialPdf& q, double t,
                                    int n_dims, bool positive_prefactor_exponent = true);

/// Writes rows `set_id,label,y1..yd`; the label field is left empty for rows
/// without one.
void save_embedding_csv(const Embedding& e, const std::vector<std::optional<int>>& labels,
                        const std::string& path);

/// Sidecar JSON with method, resolved parameters, spectrum, and diagnostics.
void save_spectrum_json(const Embedding& e, const std::string& path);

}  // namespace fine
