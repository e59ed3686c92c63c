#pragma once

#include <Eigen/Core>

namespace fmcw {

struct HermitianEigen {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXcd vectors; // column i pairs with values(i)
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
/// Throws std::invalid_argument if the input is not square or departs from
/// Hermitian symmetry by more than 1e-9·max|R|.
HermitianEigen hermitian_eig(const Eigen::MatrixXcd& R);

}  // namespace fmcw
