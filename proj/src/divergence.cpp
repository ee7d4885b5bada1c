#include "fine/divergence.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <utility>

#include "fine/errors.hpp"
#include "fine/text_io.hpp"
#include "fine/threading.hpp"

namespace fine {

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::fisher_kl: return "fisher_kl";
        case Metric::hellinger: return "hellinger";
        case Metric::cosine: return "cosine";
        case Metric::euclidean_l2: return "euclidean_l2";
        case Metric::fisher_exact_gaussian: return "fisher_exact_gaussian";
    }
    throw InvalidParameterError("unknown metric enum value");
}

Metric metric_from_name(const std::string& name) {
    if (name == "fisher_kl") return Metric::fisher_kl;
    if (name == "hellinger") return Metric::hellinger;
    if (name == "cosine") return Metric::cosine;
    if (name == "euclidean_l2") return Metric::euclidean_l2;
    if (name == "fisher_exact_gaussian") return Metric::fisher_exact_gaussian;
    throw InvalidParameterError("unknown metric name: " + name);
}

void DissimilarityMatrix::validate() const {
    const auto n = values.rows();
    if (values.cols() != n) throw FormatError("dissimilarity matrix is not square");
    if (static_cast<long>(ids.size()) != n)
        throw FormatError("dissimilarity matrix id count does not match its size");
    for (long i = 0; i < n; ++i) {
        if (values(i, i) != 0.0)
            throw FormatError("dissimilarity matrix has nonzero diagonal at " + std::to_string(i));
        for (long j = 0; j < n; ++j) {
            const double v = values(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw FormatError("dissimilarity matrix entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") is negative or non-finite");
            if (std::abs(v - values(j, i)) > 1e-12)
                throw FormatError("dissimilarity matrix asymmetric at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
        }
    }
}

double kl_empirical(const Kde& p, const Kde& q, bool* clamped) {
    if (p.dim() != q.dim())
        throw DimensionError("kl_empirical: dimension mismatch (" + std::to_string(p.dim()) +
                             " vs " + std::to_string(q.dim()) + ")");
    const Eigen::MatrixXd& x = p.samples();
    const int n = static_cast<int>(x.rows());
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
        const auto row = x.row(t).transpose();
        acc += p.log_eval(row) - q.log_eval(row);
    }
    const double raw = acc / n;
    const bool negative = raw < 0.0;
    if (clamped != nullptr) *clamped = negative;
    return negative ? 0.0 : raw;
}

double kl_symmetric(const Kde& p, const Kde& q, int* clamp_count) {
    bool c1 = false;
    bool c2 = false;
    const double forward = kl_empirical(p, q, &c1);
    const double backward = kl_empirical(q, p, &c2);
    if (clamp_count != nullptr) *clamp_count += static_cast<int>(c1) + static_cast<int>(c2);
    return forward + backward;
}

double fisher_approx_from_kl(const Kde& p, const Kde& q, int* clamp_count) {
    return std::sqrt(kl_symmetric(p, q, clamp_count));
}

double kl_gaussian_closed(const GaussianParams& a, const GaussianParams& b) {
    if (a.sigma <= 0.0 || b.sigma <= 0.0)
        throw InvalidParameterError("kl_gaussian_closed: sigma must be positive");
    const double va = a.sigma * a.sigma;
    const double vb = b.sigma * b.sigma;
    const double dmu = b.mu - a.mu;
    return 0.5 * (std::log(vb / va) + va / vb + dmu * dmu / vb - 1.0);
}

double fisher_gaussian_closed(const GaussianParams& a, const GaussianParams& b) {
    if (a.sigma <= 0.0 || b.sigma <= 0.0)
        throw InvalidParameterError("fisher_gaussian_closed: sigma must be positive");
    if (a.mu == b.mu && a.sigma == b.sigma) return 0.0;
    // Hyperbolic half-plane distance at the points (mu/sqrt(2), sigma).
    const double dx = (a.mu - b.mu) / std::sqrt(2.0);
    const double near = std::hypot(dx, a.sigma - b.sigma);
    const double far = std::hypot(dx, a.sigma + b.sigma);
    // (far + near) / (far - near) rewritten with far^2 - near^2 = 4*sigma_a*sigma_b,
    // which avoids the cancellation in the denominator for nearby parameters.
    const double sum = far + near;
    return std::sqrt(2.0) * std::log(sum * sum / (4.0 * a.sigma * b.sigma));
}

namespace {

void check_dict(const MultinomialPdf& p, const MultinomialPdf& q, const char* what) {
    if (p.dict_size() != q.dict_size())
        throw DimensionError(std::string(what) + ": dictionary size mismatch (" +
                             std::to_string(p.dict_size()) + " vs " + std::to_string(q.dict_size()) +
                             ")");
}

}  // namespace

double hellinger_multinomial(const MultinomialPdf& p, const MultinomialPdf& q) {
    check_dict(p, q, "hellinger_multinomial");
    double acc = 0.0;
    for (int i = 0; i < p.dict_size(); ++i) {
        const double d = std::sqrt(p.probs[i]) - std::sqrt(q.probs[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

double cosine_multinomial(const MultinomialPdf& p, const MultinomialPdf& q) {
    check_dict(p, q, "cosine_multinomial");
    double bc = 0.0;
    for (int i = 0; i < p.dict_size(); ++i) bc += std::sqrt(p.probs[i] * q.probs[i]);
    if (bc > 1.0) bc = 1.0;
    if (bc < -1.0) bc = -1.0;
    return 2.0 * std::acos(bc);
}

double euclidean_l2_multinomial(const MultinomialPdf& p, const MultinomialPdf& q) {
    check_dict(p, q, "euclidean_l2_multinomial");
    return (p.probs - q.probs).norm();
}

double alpha_divergence_multinomial(const MultinomialPdf& p, const MultinomialPdf& q,
                                    double alpha) {
    check_dict(p, q, "alpha_divergence_multinomial");
    const int n = p.dict_size();
    if (alpha == 1.0) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double qi = q.probs[i];
            if (qi <= 0.0) continue;
            const double pi = p.probs[i];
            if (pi <= 0.0)
                throw SupportError("alpha=1 divergence undefined: q has mass where p is zero");
            acc += qi * std::log(qi / pi);
        }
        return acc;
    }
    if (alpha == -1.0) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double pi = p.probs[i];
            if (pi <= 0.0) continue;
            const double qi = q.probs[i];
            if (qi <= 0.0)
                throw SupportError("alpha=-1 divergence undefined: p has mass where q is zero");
            acc += pi * std::log(pi / qi);
        }
        return acc;
    }
    const double ep = (1.0 - alpha) / 2.0;
    const double eq = (1.0 + alpha) / 2.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double pi = p.probs[i];
        const double qi = q.probs[i];
        if (pi == 0.0 && qi == 0.0) continue;
        if ((pi == 0.0 && ep < 0.0) || (qi == 0.0 && eq < 0.0))
            throw SupportError("alpha divergence undefined: zero probability raised to a negative power");
        s += std::pow(pi, ep) * std::pow(qi, eq);
    }
    return 4.0 / (1.0 - alpha * alpha) * (1.0 - s);
}

namespace {

using PairList = std::vector<std::pair<int, int>>;

PairList upper_triangle_pairs(int n) {
    PairList pairs;
    pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

void check_ids(size_t n_pdfs, const std::vector<std::string>& ids) {
    if (n_pdfs == 0) throw EmptyInputError("build_dissimilarity_matrix: no PDFs given");
    if (ids.size() != n_pdfs)
        throw InvalidParameterError("build_dissimilarity_matrix: id count does not match PDF count");
}

DissimilarityMatrix assemble(int n, Metric metric, std::vector<std::string> ids, int threads,
                             const std::function<double(int, int)>& entry) {
    DissimilarityMatrix out;
    out.metric = metric;
    out.ids = std::move(ids);
    out.values = Eigen::MatrixXd::Zero(n, n);
    const PairList pairs = upper_triangle_pairs(n);
    parallel_for(static_cast<int>(pairs.size()), threads, [&](int t) {
        const auto [i, j] = pairs[static_cast<size_t>(t)];
        out.values(i, j) = entry(i, j);
    });
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.values(j, i) = out.values(i, j);
    out.validate();
    return out;
}

}  // namespace

DissimilarityMatrix build_dissimilarity_matrix(const std::vector<Kde>& pdfs,
                                               const std::vector<std::string>& ids, Metric metric,
                                               int threads, MatrixDiagnostics* diag) {
    check_ids(pdfs.size(), ids);
    if (metric != Metric::fisher_kl)
        throw MetricMismatchError("metric " + metric_name(metric) +
                                  " is not defined for kernel density estimates");
    const int n = static_cast<int>(pdfs.size());
    const int dim = pdfs[0].dim();
    for (const Kde& k : pdfs)
        if (k.dim() != dim)
            throw DimensionError("build_dissimilarity_matrix: KDEs have mixed dimensions");

    // Log-density of each estimate at its own samples, reused across all pairs.
    std::vector<Eigen::VectorXd> self_log(static_cast<size_t>(n));
    parallel_for(n, threads, [&](int i) {
        const Eigen::MatrixXd& x = pdfs[static_cast<size_t>(i)].samples();
        Eigen::VectorXd v(x.rows());
        for (int t = 0; t < x.rows(); ++t)
            v[t] = pdfs[static_cast<size_t>(i)].log_eval(x.row(t).transpose());
        self_log[static_cast<size_t>(i)] = std::move(v);
    });

    std::atomic<int> clamp_count{0};
    auto directed_kl = [&](int from, int to) {
        const Eigen::MatrixXd& x = pdfs[static_cast<size_t>(from)].samples();
        const Eigen::VectorXd& own = self_log[static_cast<size_t>(from)];
        double acc = 0.0;
        for (int t = 0; t < x.rows(); ++t)
            acc += own[t] - pdfs[static_cast<size_t>(to)].log_eval(x.row(t).transpose());
        const double raw = acc / x.rows();
        if (raw < 0.0) {
            clamp_count.fetch_add(1, std::memory_order_relaxed);
            return 0.0;
        }
        return raw;
    };
    DissimilarityMatrix out = assemble(n, metric, ids, threads, [&](int i, int j) {
        return std::sqrt(directed_kl(i, j) + directed_kl(j, i));
    });
    if (diag != nullptr) diag->kl_clamped += clamp_count.load();
    return out;
}

DissimilarityMatrix build_dissimilarity_matrix(const std::vector<MultinomialPdf>& pdfs,
                                               const std::vector<std::string>& ids, Metric metric,
                                               int threads) {
    check_ids(pdfs.size(), ids);
    const int n = static_cast<int>(pdfs.size());
    const int dict = pdfs[0].dict_size();
    for (const MultinomialPdf& p : pdfs)
        if (p.dict_size() != dict)
            throw DimensionError("build_dissimilarity_matrix: mixed dictionary sizes");
    double (*entry)(const MultinomialPdf&, const MultinomialPdf&) = nullptr;
    switch (metric) {
        case Metric::hellinger: entry = hellinger_multinomial; break;
        case Metric::cosine: entry = cosine_multinomial; break;
        case Metric::euclidean_l2: entry = euclidean_l2_multinomial; break;
        default:
            throw MetricMismatchError("metric " + metric_name(metric) +
                                      " is not defined for multinomial PDFs");
    }
    return assemble(n, metric, ids, threads, [&](int i, int j) {
        return entry(pdfs[static_cast<size_t>(i)], pdfs[static_cast<size_t>(j)]);
    });
}

DissimilarityMatrix build_dissimilarity_matrix(const std::vector<GaussianParams>& pdfs,
                                               const std::vector<std::string>& ids, Metric metric,
                                               int threads) {
    check_ids(pdfs.size(), ids);
    const int n = static_cast<int>(pdfs.size());
    if (metric == Metric::fisher_exact_gaussian) {
        return assemble(n, metric, ids, threads, [&](int i, int j) {
            return fisher_gaussian_closed(pdfs[static_cast<size_t>(i)],
                                          pdfs[static_cast<size_t>(j)]);
        });
    }
    if (metric == Metric::fisher_kl) {
        // Closed-form KL symmetrized, then the square-root local approximation.
        return assemble(n, metric, ids, threads, [&](int i, int j) {
            const GaussianParams& a = pdfs[static_cast<size_t>(i)];
            const GaussianParams& b = pdfs[static_cast<size_t>(j)];
            return std::sqrt(kl_gaussian_closed(a, b) + kl_gaussian_closed(b, a));
        });
    }
    throw MetricMismatchError("metric " + metric_name(metric) +
                              " is not defined for Gaussian parameter lists");
}

void save_dissimilarity_csv(const DissimilarityMatrix& matrix, const std::string& path) {
    std::ostringstream out;
    for (size_t i = 0; i < matrix.ids.size(); ++i) {
        if (i > 0) out << ',';
        out << matrix.ids[i];
    }
    out << '\n';
    const int n = matrix.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j > 0) out << ',';
            out << format_double(matrix.values(i, j));
        }
        out << '\n';
    }
    write_file(path, out.str());
}

DissimilarityMatrix load_dissimilarity_csv(const std::string& path, Metric metric) {
    const std::vector<std::string> lines = read_lines(path);
    DissimilarityMatrix out;
    out.metric = metric;
    out.ids = split_csv_line(lines[0]);
    const int n = static_cast<int>(out.ids.size());
    if (static_cast<int>(lines.size()) != n + 1)
        throw FormatError(path + ": expected " + std::to_string(n) + " matrix rows, found " +
                          std::to_string(lines.size() - 1));
    out.values.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const std::vector<std::string> fields = split_csv_line(lines[static_cast<size_t>(i) + 1]);
        if (static_cast<int>(fields.size()) != n)
            throw ParseError(path + ": wrong column count in matrix row", i + 2);
        for (int j = 0; j < n; ++j) {
            const auto v = parse_double(fields[static_cast<size_t>(j)]);
            if (!v) throw ParseError(path + ": non-numeric matrix entry '" + fields[j] + "'", i + 2);
            out.values(i, j) = *v;
        }
    }
    out.validate();
    return out;
}

}  // namespace fine
