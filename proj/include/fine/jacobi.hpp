#pragma once

#include <Eigen/Core>

namespace fine {

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // column i pairs with values[i]
};

/// Cyclic Jacobi eigendecomposition for symmetric matrices. Sweeps run until
/// the off-diagonal Frobenius norm drops below 1e-14 * ||A||_F. Eigenvalues
/// come back ascending and each eigenvector's first nonzero component is made
/// positive, so results are bitwise reproducible.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a);

}  // namespace fine
