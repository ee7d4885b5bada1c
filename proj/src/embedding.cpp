#include "fine/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "fine/errors.hpp"
#include "fine/jacobi.hpp"
#include "fine/text_io.hpp"

namespace fine {

std::string embed_method_name(EmbedMethod m) {
    switch (m) {
        case EmbedMethod::cmds: return "cmds";
        case EmbedMethod::lem: return "lem";
        case EmbedMethod::ccdr: return "ccdr";
        case EmbedMethod::pca: return "pca";
    }
    throw InvalidParameterError("unknown embed method enum value");
}

EmbedMethod embed_method_from_name(const std::string& name) {
    if (name == "cmds") return EmbedMethod::cmds;
    if (name == "lem") return EmbedMethod::lem;
    if (name == "ccdr") return EmbedMethod::ccdr;
    if (name == "pca") return EmbedMethod::pca;
    throw InvalidParameterError("unknown embed method name: " + name);
}

Embedding classical_mds(const DissimilarityMatrix& d_matrix, int dim) {
    const int n = d_matrix.size();
    if (dim < 1 || dim > n)
        throw InvalidParameterError("classical_mds: dim " + std::to_string(dim) +
                                    " outside [1, " + std::to_string(n) + "]");
    const Eigen::MatrixXd squared = d_matrix.values.array().square();
    const Eigen::VectorXd row_mean = squared.rowwise().mean();
    const double grand_mean = row_mean.mean();
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = -0.5 * (squared(i, j) - row_mean[i] - row_mean[j] + grand_mean);
            b(i, j) = v;
            b(j, i) = v;
        }
    }
    const SymmetricEigen eig = jacobi_eigen(b);

    double neg_mass = 0.0;
    double total_mass = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lambda = eig.values[i];
        total_mass += std::abs(lambda);
        if (lambda < 0.0) neg_mass += -lambda;
    }

    Embedding out;
    out.method = EmbedMethod::cmds;
    out.ids = d_matrix.ids;
    out.dim = dim;
    out.negative_eigen_mass = total_mass > 0.0 ? neg_mass / total_mass : 0.0;
    out.coords = Eigen::MatrixXd::Zero(n, dim);
    out.spectrum.reserve(static_cast<size_t>(dim));
    // eigenvalues this far below the largest are double-centering roundoff,
    // not geometry; treat them like the non-positive ones and zero the axis
    const double lambda_tol = 1e-12 * std::max(eig.values[n - 1], 0.0);
    for (int a = 0; a < dim; ++a) {
        const int col = n - 1 - a;  // jacobi_eigen sorts ascending
        const double lambda = eig.values[col];
        out.spectrum.push_back(lambda);
        if (lambda > lambda_tol) {
            out.coords.col(a) = std::sqrt(lambda) * eig.vectors.col(col);
        } else {
            ++out.zero_padded_dims;
        }
    }
    return out;
}

namespace {

Embedding lem_impl(const NeighborGraph& graph, const std::vector<std::string>& ids,
                   const std::vector<std::optional<int>>* labels, int dim, const LemParams& params,
                   EmbedMethod method) {
    const int n = graph.n_nodes;
    if (static_cast<int>(ids.size()) != n)
        throw InvalidParameterError("laplacian embedding: id count does not match graph");
    if (dim < 1 || dim > n - 1)
        throw InvalidParameterError("laplacian embedding: dim " + std::to_string(dim) +
                                    " outside [1, " + std::to_string(n - 1) + "]");
    if (!graph.connected)
        throw DisconnectedGraphError("laplacian embedding: adjacency graph is not connected");

    double heat_t = params.heat_t;
    const bool unit_weights = std::isinf(heat_t);
    if (!unit_weights) {
        if (heat_t < 0.0) throw InvalidParameterError("laplacian embedding: heat_t must be positive");
        if (heat_t == 0.0) {
            double acc = 0.0;
            for (const GraphEdge& e : graph.edges) acc += e.weight * e.weight;
            heat_t = graph.edges.empty() ? 1.0 : acc / static_cast<double>(graph.edges.size());
            if (heat_t <= 0.0) heat_t = 1.0;  // all-zero dissimilarities
        }
    }

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (const GraphEdge& e : graph.edges) {
        const double val = unit_weights ? 1.0 : std::exp(-(e.weight * e.weight) / heat_t);
        w(e.i, e.j) = val;
        w(e.j, e.i) = val;
    }
    const double beta = params.label_weight_beta;
    if (method == EmbedMethod::ccdr && beta > 0.0 && labels != nullptr) {
        for (int i = 0; i < n; ++i) {
            const auto& li = (*labels)[static_cast<size_t>(i)];
            if (!li) continue;
            for (int j = i + 1; j < n; ++j) {
                const auto& lj = (*labels)[static_cast<size_t>(j)];
                if (!lj || *lj != *li) continue;
                const double val = w(i, j) + beta;
                w(i, j) = val;
                w(j, i) = val;
            }
        }
    }

    const Eigen::VectorXd degree = w.rowwise().sum();
    for (int i = 0; i < n; ++i)
        if (degree[i] <= 0.0)
            throw DisconnectedGraphError("laplacian embedding: node " + std::to_string(i) +
                                         " has zero weighted degree");
    const Eigen::VectorXd sqrt_degree = degree.cwiseSqrt();

    // Symmetric reduction of L f = lambda Deg f: solve (I - Deg^-1/2 W Deg^-1/2) g
    // and map back through f = Deg^-1/2 g.
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double m = w(i, j) / (sqrt_degree[i] * sqrt_degree[j]);
            const double v = (i == j) ? 1.0 - m : -m;
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    const SymmetricEigen eig = jacobi_eigen(c);

    int first = 0;
    while (first < n && eig.values[first] < 1e-9) ++first;
    const int usable = n - first;
    if (dim > usable)
        throw InsufficientSpectrumError("laplacian embedding: " + std::to_string(dim) +
                                        " dimensions requested but only " + std::to_string(usable) +
                                        " nontrivial eigenpairs available");

    Embedding out;
    out.method = method;
    out.ids = ids;
    out.dim = dim;
    out.graph_k = graph.k;
    out.heat_t = unit_weights ? std::numeric_limits<double>::infinity() : heat_t;
    out.beta = method == EmbedMethod::ccdr ? beta : 0.0;
    out.coords.resize(n, dim);
    out.spectrum.reserve(static_cast<size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        const int col = first + a;
        out.spectrum.push_back(eig.values[col]);
        out.coords.col(a) = eig.vectors.col(col).cwiseQuotient(sqrt_degree);
    }
    return out;
}

}  // namespace

Embedding laplacian_eigenmaps(const NeighborGraph& graph, const std::vector<std::string>& ids,
                              int dim, const LemParams& params) {
    return lem_impl(graph, ids, nullptr, dim, params, EmbedMethod::lem);
}

Embedding laplacian_eigenmaps(const DissimilarityMatrix& d_matrix, int dim,
                              const LemParams& params) {
    const int n = d_matrix.size();
    const int k = params.k_neighbors > 0 ? params.k_neighbors : default_graph_k(n);
    const NeighborGraph graph = build_neighbor_graph(d_matrix, k);
    return lem_impl(graph, d_matrix.ids, nullptr, dim, params, EmbedMethod::lem);
}

Embedding ccdr(const NeighborGraph& graph, const std::vector<std::string>& ids,
               const std::vector<std::optional<int>>& labels, int dim, const LemParams& params) {
    if (static_cast<int>(labels.size()) != graph.n_nodes)
        throw InvalidParameterError("ccdr: label count does not match graph");
    if (params.label_weight_beta < 0.0)
        throw InvalidParameterError("ccdr: label_weight_beta must be non-negative");
    return lem_impl(graph, ids, &labels, dim, params, EmbedMethod::ccdr);
}

Embedding ccdr(const DissimilarityMatrix& d_matrix, const std::vector<std::optional<int>>& labels,
               int dim, const LemParams& params) {
    const int n = d_matrix.size();
    const int k = params.k_neighbors > 0 ? params.k_neighbors : default_graph_k(n);
    const NeighborGraph graph = build_neighbor_graph(d_matrix, k);
    return ccdr(graph, d_matrix.ids, labels, dim, params);
}

Embedding pca_embed(const Eigen::MatrixXd& vectors, const std::vector<std::string>& ids, int dim) {
    const int n = static_cast<int>(vectors.rows());
    const int m = static_cast<int>(vectors.cols());
    if (static_cast<int>(ids.size()) != n)
        throw InvalidParameterError("pca_embed: id count does not match row count");
    if (dim < 1 || dim > std::min(n, m))
        throw InvalidParameterError("pca_embed: dim " + std::to_string(dim) + " outside [1, " +
                                    std::to_string(std::min(n, m)) + "]");
    const Eigen::RowVectorXd mean = vectors.colwise().mean();
    const Eigen::MatrixXd centered = vectors.rowwise() - mean;
    Eigen::MatrixXd cov;
    if (n > 1) {
        cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) cov(j, i) = cov(i, j);
    } else {
        cov = Eigen::MatrixXd::Zero(m, m);
    }
    const SymmetricEigen eig = jacobi_eigen(cov);
    const double max_lambda = std::max(eig.values[m - 1], 0.0);
    const double rank_tol = 1e-12 * max_lambda;

    Embedding out;
    out.method = EmbedMethod::pca;
    out.ids = ids;
    out.dim = dim;
    out.coords = Eigen::MatrixXd::Zero(n, dim);
    out.spectrum.reserve(static_cast<size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        const int col = m - 1 - a;
        const double lambda = eig.values[col];
        out.spectrum.push_back(lambda);
        if (lambda > rank_tol) {
            out.coords.col(a) = centered * eig.vectors.col(col);
        } else {
            ++out.zero_padded_dims;
        }
    }
    return out;
}

std::vector<int> knn_classify(const Eigen::MatrixXd& train_coords,
                              const std::vector<int>& train_labels,
                              const Eigen::MatrixXd& test_coords, int k) {
    const int n_train = static_cast<int>(train_coords.rows());
    if (n_train == 0) throw InsufficientSamplesError("knn_classify: empty training set");
    if (static_cast<int>(train_labels.size()) != n_train)
        throw InvalidParameterError("knn_classify: label count does not match training rows");
    if (train_coords.cols() != test_coords.cols())
        throw DimensionError("knn_classify: train and test dimensions differ");
    if (k < 1 || k > n_train)
        throw InvalidParameterError("knn_classify: k " + std::to_string(k) + " outside [1, " +
                                    std::to_string(n_train) + "]");

    std::vector<int> predictions;
    predictions.reserve(static_cast<size_t>(test_coords.rows()));
    std::vector<std::pair<double, int>> order(static_cast<size_t>(n_train));
    for (int r = 0; r < test_coords.rows(); ++r) {
        for (int i = 0; i < n_train; ++i)
            order[static_cast<size_t>(i)] = {(train_coords.row(i) - test_coords.row(r)).norm(), i};
        std::sort(order.begin(), order.end());

        struct Tally {
            int votes = 0;
            double dist_sum = 0.0;
        };
        std::map<int, Tally> tallies;
        for (int t = 0; t < k; ++t) {
            const auto& [dist, idx] = order[static_cast<size_t>(t)];
            Tally& tally = tallies[train_labels[static_cast<size_t>(idx)]];
            ++tally.votes;
            tally.dist_sum += dist;
        }
        int best_label = -1;
        int best_votes = -1;
        double best_mean = std::numeric_limits<double>::infinity();
        for (const auto& [label, tally] : tallies) {
            const double mean = tally.dist_sum / tally.votes;
            if (tally.votes > best_votes || (tally.votes == best_votes && mean < best_mean)) {
                best_label = label;
                best_votes = tally.votes;
                best_mean = mean;
            }
        }
        predictions.push_back(best_label);
    }
    return predictions;
}

double diffusion_kernel_multinomial(const MultinomialPdf& p, const MultinomialPdf& q, double t,
                                    int n_dims, bool positive_prefactor_exponent) {
    if (p.dict_size() != q.dict_size())
        throw DimensionError("diffusion_kernel_multinomial: dictionary size mismatch");
    if (t <= 0.0) throw InvalidParameterError("diffusion_kernel_multinomial: t must be positive");
    double bc = 0.0;
    for (int i = 0; i < p.dict_size(); ++i) bc += std::sqrt(p.probs[i] * q.probs[i]);
    if (bc > 1.0) bc = 1.0;
    if (bc < -1.0) bc = -1.0;
    const double angle = std::acos(bc);
    const double exponent = positive_prefactor_exponent ? n_dims / 2.0 : -n_dims / 2.0;
    const double prefactor = std::pow(4.0 * std::numbers::pi * t, exponent);
    return prefactor * std::exp(-(angle * angle) / t);
}

void save_embedding_csv(const Embedding& e, const std::vector<std::optional<int>>& labels,
                        const std::string& path) {
    if (!labels.empty() && labels.size() != e.ids.size())
        throw InvalidParameterError("save_embedding_csv: label count does not match rows");
    std::ostringstream out;
    out << "set_id,label";
    for (int a = 1; a <= e.dim; ++a) out << ",y" << a;
    out << '\n';
    for (size_t i = 0; i < e.ids.size(); ++i) {
        out << e.ids[i] << ',';
        if (!labels.empty() && labels[i]) out << *labels[i];
        for (int a = 0; a < e.dim; ++a) out << ',' << format_double(e.coords(static_cast<long>(i), a));
        out << '\n';
    }
    write_file(path, out.str());
}

void save_spectrum_json(const Embedding& e, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["method"] = embed_method_name(e.method);
    doc["dim"] = e.dim;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    if (e.method == EmbedMethod::lem || e.method == EmbedMethod::ccdr) {
        params["graph_k"] = e.graph_k;
        if (std::isinf(e.heat_t)) {
            params["heat_t"] = "inf";
        } else {
            params["heat_t"] = e.heat_t;
        }
        if (e.method == EmbedMethod::ccdr) params["beta"] = e.beta;
    }
    doc["params"] = params;
    doc["spectrum"] = e.spectrum;
    doc["diagnostics"] = {{"negative_eigen_mass", e.negative_eigen_mass},
                          {"zero_padded_dims", e.zero_padded_dims}};
    write_file(path, doc.dump(2) + "\n");
}

}  // namespace fine
