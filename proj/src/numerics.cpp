#include "podmci/numerics.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace podmci {

namespace {

void fix_singular_vector_signs(DenseMatrix& u, DenseMatrix& v) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index imax = 0;
    u.col(k).cwiseAbs().maxCoeff(&imax);
    if (u(imax, k) < 0.0) {
      u.col(k) = -u.col(k);
      if (k < v.cols()) v.col(k) = -v.col(k);
    }
  }
}

}  // namespace

SvdResult svd(const DenseMatrix& a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw std::invalid_argument("svd: empty matrix");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("svd: matrix has non-finite entries");
  }
  Eigen::BDCSVD<DenseMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("svd: did not converge for " +
                             std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " matrix");
  }
  SvdResult result;
  result.u = dec.matrixU();
  result.singular_values = dec.singularValues();
  result.v = dec.matrixV();
  fix_singular_vector_signs(result.u, result.v);
  return result;
}

struct SparseSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double rel_tol = 1e-10;
  // Column-major copy kept alive for residual checks.
  Eigen::SparseMatrix<double> a;
};

SparseSolver::SparseSolver(const SparseMatrix& a, double rel_tol)
    : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("SparseSolver: operator must be square");
  }
  if (rel_tol <= 0.0 || rel_tol >= 1.0) {
    throw std::invalid_argument("SparseSolver: rel_tol must be in (0, 1)");
  }
  impl_->rel_tol = rel_tol;
  impl_->a = a;
  impl_->lu.compute(impl_->a);
  if (impl_->lu.info() != Eigen::Success) {
    throw std::runtime_error("SparseSolver: LU factorization failed for " +
                             std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " operator");
  }
}

SparseSolver::~SparseSolver() = default;
SparseSolver::SparseSolver(SparseSolver&&) noexcept = default;
SparseSolver& SparseSolver::operator=(SparseSolver&&) noexcept = default;

Vector SparseSolver::solve(const Vector& b) const {
  if (b.size() != impl_->a.rows()) {
    throw std::invalid_argument("SparseSolver: right-hand side length " +
                                std::to_string(b.size()) + " != " +
                                std::to_string(impl_->a.rows()));
  }
  Vector x = impl_->lu.solve(b);
  const double bnorm = b.norm();
  double residual = (impl_->a * x - b).norm();
  if (residual > impl_->rel_tol * bnorm && bnorm > 0.0) {
    // One step of iterative refinement before giving up.
    Vector dx = impl_->lu.solve(b - impl_->a * x);
    x += dx;
    residual = (impl_->a * x - b).norm();
    if (residual > impl_->rel_tol * bnorm) {
      throw std::runtime_error(
          "solve_sparse: achieved relative residual " +
          std::to_string(residual / bnorm) + " exceeds tolerance " +
          std::to_string(impl_->rel_tol));
    }
  }
  return x;
}

Vector solve_sparse(const SparseMatrix& a, const Vector& b, double rel_tol) {
  return SparseSolver(a, rel_tol).solve(b);
}

Vector least_squares_project(const DenseMatrix& phi, const Vector& y) {
  if (phi.rows() != y.size()) {
    throw std::invalid_argument("least_squares_project: dimension mismatch");
  }
  const DenseMatrix gram = phi.transpose() * phi;
  const double defect =
      (gram - DenseMatrix::Identity(phi.cols(), phi.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (defect > 1e-8) {
    throw std::invalid_argument(
        "least_squares_project: columns not orthonormal (defect " +
        std::to_string(defect) + ")");
  }
  return phi.transpose() * y;
}

}  // namespace podmci
