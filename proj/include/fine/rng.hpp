#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace fine {

/// Seeded 64-bit generator with hand-rolled sampling transforms.
///
/// The mt19937_64 engine output is bit-exact by the standard, but the standard
/// library *distributions* are implementation-defined. Every transform here is
/// spelled out so generated data is identical wherever the code compiles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the second deviate of each pair is cached.
    double normal();

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape == 0 yields exactly 0.
    double gamma(double shape);

    /// Normalized Dirichlet draw for an arbitrary parameter vector (entries >= 0).
    Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha);

    /// n draws from the categorical distribution over probs, returned as counts.
    Eigen::VectorXi multinomial_counts(const Eigen::VectorXd& probs, int n);

    /// Fisher-Yates shuffle of indices 0..n-1.
    std::vector<int> permutation(int n);

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fine
