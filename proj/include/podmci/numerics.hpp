#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <memory>
#include <string>

namespace podmci {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Compressed-row sparse operator. Assembled from triplets; square when used
// as a system matrix.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

struct SvdResult {
  DenseMatrix u;            // left singular vectors, one per column
  Vector singular_values;   // descending, non-negative
  DenseMatrix v;            // right singular vectors, one per column
};

// Thin SVD with min(rows, cols) triplets. Singular-vector signs are fixed by
// making the largest-magnitude entry of each left singular vector positive,
// so results are reproducible across runs and platforms.
SvdResult svd(const DenseMatrix& a);

// Direct sparse solve (LU). Throws if the factorization breaks down or the
// achieved residual exceeds rel_tol * ||b||.
Vector solve_sparse(const SparseMatrix& a, const Vector& b,
                    double rel_tol = 1e-10);

// Reusable factorization for repeated solves against one operator.
class SparseSolver {
 public:
  explicit SparseSolver(const SparseMatrix& a, double rel_tol = 1e-10);
  ~SparseSolver();
  SparseSolver(SparseSolver&&) noexcept;
  SparseSolver& operator=(SparseSolver&&) noexcept;

  Vector solve(const Vector& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Projection coordinates Phi^T y for a Phi with orthonormal columns
// (pseudoinverse reduces to the transpose). Throws if the columns are not
// orthonormal to 1e-8.
Vector least_squares_project(const DenseMatrix& phi, const Vector& y);

}  // namespace podmci
