#pragma once

#include <memory>
#include <optional>

#include <Eigen/Core>

#include "fine/datasets.hpp"

namespace fine {

struct BandwidthResult {
    Eigen::VectorXd values;
    bool degenerate = false;  // true if any zero-variance dimension was substituted
};

/// Gaussian-kernel density estimate with a diagonal per-dimension bandwidth.
/// Immutable after construction; evaluation is lock-free and thread-safe.
class Kde {
public:
    Kde(std::shared_ptr<const Eigen::MatrixXd> samples, Eigen::VectorXd bandwidths,
        bool degenerate_bandwidth);

    /// log p(x) via log-sum-exp over per-sample kernel terms. The terms are
    /// accumulated in ascending value order, which makes the result exactly
    /// invariant under permutation of the sample rows.
    double log_eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    double eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    int dim() const { return static_cast<int>(samples_->cols()); }
    int n_samples() const { return static_cast<int>(samples_->rows()); }
    const Eigen::MatrixXd& samples() const { return *samples_; }
    const Eigen::VectorXd& bandwidths() const { return bandwidths_; }
    double log_norm_const() const { return log_norm_; }
    bool degenerate_bandwidth() const { return degenerate_bandwidth_; }

private:
    std::shared_ptr<const Eigen::MatrixXd> samples_;
    Eigen::VectorXd bandwidths_;
    double log_norm_;
    bool degenerate_bandwidth_;
};

/// Normalized non-negative vector on the dictionary simplex.
struct MultinomialPdf {
    Eigen::VectorXd probs;

    int dict_size() const { return static_cast<int>(probs.size()); }
};

/// Silverman's multivariate rule: h_k = sd_k * (4 / ((dim+2) n))^(1/(dim+4))
/// with the unbiased per-dimension standard deviation. Zero-variance dimensions
/// get the largest sd across dimensions substituted (1.0 if all are zero) and
/// the degenerate flag set.
BandwidthResult silverman_bandwidth(const Eigen::MatrixXd& samples);

Kde fit_kde(const SampleSet& set, std::optional<Eigen::VectorXd> bandwidths = std::nullopt);
Kde fit_kde(std::shared_ptr<const Eigen::MatrixXd> samples,
            std::optional<Eigen::VectorXd> bandwidths = std::nullopt);

MultinomialPdf term_frequency_pdf(const Eigen::VectorXi& counts);

/// Validated simplex vector from non-negative weights (normalizes the sum away).
MultinomialPdf normalized_pdf(const Eigen::VectorXd& weights);

}  // namespace fine
