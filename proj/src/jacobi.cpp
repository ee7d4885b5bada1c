#include "fine/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fine/errors.hpp"

namespace fine {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n) throw DimensionError("jacobi_eigen: matrix is not square");
    Eigen::MatrixXd m = a;
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double threshold = 1e-14 * a.norm();

    Eigen::VectorXd tp(n);
    Eigen::VectorXd tq(n);
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(m) > threshold; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e154) {
                    t = 1.0 / (2.0 * theta);  // avoids overflow in theta*theta
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = m(p, p);
                const double aqq = m(q, q);
                // rotate the two columns, mirror into the rows, then patch the
                // 2x2 block with the stable t-form values
                tp = m.col(p);
                tq = m.col(q);
                m.col(p) = c * tp - s * tq;
                m.col(q) = s * tp + c * tq;
                m.row(p) = m.col(p).transpose();
                m.row(q) = m.col(q).transpose();
                m(p, p) = app - t * apq;
                m(q, q) = aqq + t * apq;
                m(p, q) = 0.0;
                m(q, p) = 0.0;

                tp = v.col(p);
                tq = v.col(q);
                v.col(p) = c * tp - s * tq;
                v.col(q) = s * tp + c * tq;
            }
        }
    }

    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) {
        if (m(x, x) != m(y, y)) return m(x, x) < m(y, y);
        return x < y;
    });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int col = 0; col < n; ++col) {
        const int src = idx[static_cast<size_t>(col)];
        out.values[col] = m(src, src);
        out.vectors.col(col) = v.col(src);
        for (int i = 0; i < n; ++i) {
            const double x = out.vectors(i, col);
            if (x != 0.0) {
                if (x < 0.0) out.vectors.col(col) = -out.vectors.col(col);
                break;
            }
        }
    }
    return out;
}

}  // namespace fine
