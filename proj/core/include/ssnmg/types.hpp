#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>

namespace ssnmg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Raised when an iterative method fails to reach its tolerance or breaks down.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssnmg
