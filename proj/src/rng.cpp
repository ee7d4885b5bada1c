#include "fine/rng.hpp"

#include <cmath>
#include <numbers>

#include "fine/errors.hpp"

namespace fine {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double Rng::gamma(double shape) {
    if (shape < 0.0) throw InvalidParameterError("gamma shape must be >= 0");
    if (shape == 0.0) return 0.0;
    if (shape < 1.0) {
        // Boost trick: G(a) = G(a+1) * U^(1/a)
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform();
        while (u <= 0.0) u = uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& alpha) {
    Eigen::VectorXd g(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) g[i] = gamma(alpha[i]);
    const double total = g.sum();
    if (total <= 0.0) throw InvalidParameterError("dirichlet parameters produced an all-zero draw");
    return g / total;
}

Eigen::VectorXi Rng::multinomial_counts(const Eigen::VectorXd& probs, int n) {
    Eigen::VectorXd cdf(probs.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(probs.size());
    for (int s = 0; s < n; ++s) {
        const double u = uniform() * acc;
        const double* begin = cdf.data();
        const double* it = std::lower_bound(begin, begin + cdf.size(), u);
        Eigen::Index idx = it - begin;
        if (idx >= cdf.size()) idx = cdf.size() - 1;
        counts[idx] += 1;
    }
    return counts;
}

std::vector<int> Rng::permutation(int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(engine_() % static_cast<std::uint64_t>(i + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

}  // namespace fine
