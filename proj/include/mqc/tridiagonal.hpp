#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mqc {

/// Eigenpairs of a real symmetric tridiagonal matrix, ascending.
struct TridiagonalEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // columns are eigenvectors
};

/// Lowest `count` eigenpairs (MRRR, LAPACK dstevr). With want_vectors = false
/// the vectors matrix is left empty.
TridiagonalEigen tridiagonal_lowest(const std::vector<double>& diagonal,
                                    const std::vector<double>& off_diagonal,
                                    int count, bool want_vectors = true);

/// Full eigendecomposition.
TridiagonalEigen tridiagonal_all(const std::vector<double>& diagonal,
                                 const std::vector<double>& off_diagonal);

}  // namespace mqc
