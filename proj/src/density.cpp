#include "fine/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fine/errors.hpp"

namespace fine {

Kde::Kde(std::shared_ptr<const Eigen::MatrixXd> samples, Eigen::VectorXd bandwidths,
         bool degenerate_bandwidth)
    : samples_(std::move(samples)),
      bandwidths_(std::move(bandwidths)),
      degenerate_bandwidth_(degenerate_bandwidth) {
    if (!samples_ || samples_->rows() < 1) throw InsufficientSamplesError("KDE needs at least one sample");
    if (bandwidths_.size() != samples_->cols())
        throw DimensionError("bandwidth vector size does not match sample dimension");
    for (Eigen::Index k = 0; k < bandwidths_.size(); ++k) {
        if (!(bandwidths_[k] > 0.0)) throw InvalidParameterError("bandwidths must be positive");
    }
    log_norm_ = -std::log(static_cast<double>(samples_->rows())) -
                0.5 * static_cast<double>(samples_->cols()) * std::log(2.0 * std::numbers::pi) -
                bandwidths_.array().log().sum();
}

double Kde::log_eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != samples_->cols())
        throw DimensionError("evaluation point has dimension " + std::to_string(x.size()) +
                             ", KDE has " + std::to_string(samples_->cols()));
    const Eigen::MatrixXd& s = *samples_;
    const Eigen::Index n = s.rows(), d = s.cols();

    std::vector<double> expo(static_cast<size_t>(n));
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        double q = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            const double z = (x[k] - s(i, k)) / bandwidths_[k];
            q += z * z;
        }
        expo[static_cast<size_t>(i)] = -0.5 * q;
        m = std::max(m, expo[static_cast<size_t>(i)]);
    }
    for (auto& e : expo) e = std::exp(e - m);
    std::sort(expo.begin(), expo.end());
    double total = 0.0;
    for (const double e : expo) total += e;
    return m + std::log(total) + log_norm_;
}

double Kde::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const { return std::exp(log_eval(x)); }

BandwidthResult silverman_bandwidth(const Eigen::MatrixXd& samples) {
    const Eigen::Index n = samples.rows(), d = samples.cols();
    if (n < 2) throw InsufficientSamplesError("bandwidth rule needs at least 2 samples");

    Eigen::VectorXd sd(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double mean = samples.col(k).mean();
        const double ss = (samples.col(k).array() - mean).square().sum();
        sd[k] = std::sqrt(ss / static_cast<double>(n - 1));
        if (!std::isfinite(sd[k])) throw InvalidParameterError("non-finite sample variance");
    }

    BandwidthResult out;
    const double max_sd = sd.maxCoeff();
    const double fallback = max_sd > 0.0 ? max_sd : 1.0;
    const double factor =
        std::pow(4.0 / ((static_cast<double>(d) + 2.0) * static_cast<double>(n)),
                 1.0 / (static_cast<double>(d) + 4.0));
    out.values.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        if (sd[k] > 0.0) {
            out.values[k] = sd[k] * factor;
        } else {
            out.values[k] = fallback * factor;
            out.degenerate = true;
        }
    }
    return out;
}

Kde fit_kde(const SampleSet& set, std::optional<Eigen::VectorXd> bandwidths) {
    return fit_kde(std::make_shared<const Eigen::MatrixXd>(set.points), std::move(bandwidths));
}

Kde fit_kde(std::shared_ptr<const Eigen::MatrixXd> samples,
            std::optional<Eigen::VectorXd> bandwidths) {
    if (!samples || samples->rows() < 1)
        throw InsufficientSamplesError("cannot fit a KDE on an empty sample set");
    if (bandwidths) return Kde(std::move(samples), std::move(*bandwidths), false);
    BandwidthResult bw = silverman_bandwidth(*samples);
    return Kde(std::move(samples), std::move(bw.values), bw.degenerate);
}

MultinomialPdf term_frequency_pdf(const Eigen::VectorXi& counts) {
    long total = 0;
    for (Eigen::Index i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) throw FormatError("negative count in term vector");
        total += counts[i];
    }
    if (total == 0) throw DegenerateDocumentError("term vector has zero total count");
    MultinomialPdf pdf;
    pdf.probs = counts.cast<double>() / static_cast<double>(total);
    return pdf;
}

MultinomialPdf normalized_pdf(const Eigen::VectorXd& weights) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw InvalidParameterError("pdf weights must be non-negative");
        total += weights[i];
    }
    if (!(total > 0.0)) throw DegenerateDocumentError("pdf weights sum to zero");
    MultinomialPdf pdf;
    pdf.probs = weights / total;
    return pdf;
}

}  // namespace fine
