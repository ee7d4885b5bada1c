#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fine/datasets.hpp"
#include "fine/density.hpp"

namespace fine {

enum class Metric { fisher_kl, hellinger, cosine, euclidean_l2, fisher_exact_gaussian };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// Symmetric non-negative pairwise dissimilarities with zero diagonal.
struct DissimilarityMatrix {
    Eigen::MatrixXd values;
    Metric metric = Metric::fisher_kl;
    std::vector<std::string> ids;

    int size() const { return static_cast<int>(values.rows()); }

    /// Throws if symmetry (1e-12), zero diagonal, or non-negativity is violated.
    void validate() const;
};

/// Plug-in KL estimate: mean over p's own samples of log p(x) - log q(x),
/// clamped at zero. *clamped is set when the raw value was negative.
double kl_empirical(const Kde& p, const Kde& q, bool* clamped = nullptr);

/// KL(p||q) + KL(q||p). clamp_count accumulates over both directions.
double kl_symmetric(const Kde& p, const Kde& q, int* clamp_count = nullptr);

/// sqrt of the symmetrized KL, the local Fisher-distance approximation.
double fisher_approx_from_kl(const Kde& p, const Kde& q, int* clamp_count = nullptr);

double kl_gaussian_closed(const GaussianParams& a, const GaussianParams& b);

/// Closed-form Fisher information distance between univariate normals.
double fisher_gaussian_closed(const GaussianParams& a, const GaussianParams& b);

double hellinger_multinomial(const MultinomialPdf& p, const MultinomialPdf& q);

/// 2 arccos(sum sqrt(p q)), the sphere metric; argument clamped to [-1, 1].
double cosine_multinomial(const MultinomialPdf& p, const MultinomialPdf& q);

double euclidean_l2_multinomial(const MultinomialPdf& p, const MultinomialPdf& q);

/// Alpha-divergence family; alpha = -1 and 1 are the KL forms and raise
/// SupportError when the log argument would divide by zero.
double alpha_divergence_multinomial(const MultinomialPdf& p, const MultinomialPdf& q, double alpha);

struct MatrixDiagnostics {
    int kl_clamped = 0;
};

DissimilarityMatrix build_dissimilarity_matrix(const std::vector<Kde>& pdfs,
                                               const std::vector<std::string>& ids, Metric metric,
                                               int threads = 1, MatrixDiagnostics* diag = nullptr);
DissimilarityMatrix build_dissimilarity_matrix(const std::vector<MultinomialPdf>& pdfs,
                                               const std::vector<std::string>& ids, Metric metric,
                                               int threads = 1);
DissimilarityMatrix build_dissimilarity_matrix(const std::vector<GaussianParams>& pdfs,
                                               const std::vector<std::string>& ids, Metric metric,
                                               int threads = 1);

void save_dissimilarity_csv(const DissimilarityMatrix& matrix, const std::string& path);
DissimilarityMatrix load_dissimilarity_csv(const std::string& path, Metric metric);

}  // namespace fine
