#include "podmci/rom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace podmci {

SnapshotSet stack_snapshots(const std::vector<QoiTensor>& tensors, const DenseMatrix& params) {
  if (tensors.size() < 2) {
    throw std::invalid_argument("stack_snapshots: need at least 2 snapshots");
  }
  if (static_cast<Eigen::Index>(tensors.size()) != params.rows()) {
    throw std::invalid_argument("stack_snapshots: snapshot/parameter count mismatch");
  }
  const auto& shape = tensors.front().shape;
  const int dim = tensors.front().size();
  for (std::size_t k = 1; k < tensors.size(); ++k) {
    if (tensors[k].shape != shape || tensors[k].size() != dim) {
      throw std::invalid_argument("stack_snapshots: snapshot " + std::to_string(k) +
                                  " has a mismatched shape");
    }
  }
  for (Eigen::Index a = 0; a < params.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < params.rows(); ++b) {
      if ((params.row(a) - params.row(b)).norm() == 0.0) {
        throw std::invalid_argument("stack_snapshots: duplicated parameter points " +
                                    std::to_string(a) + " and " + std::to_string(b));
      }
    }
  }

  SnapshotSet set;
  set.y_hat.resize(dim, static_cast<Eigen::Index>(tensors.size()));
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    set.y_hat.col(static_cast<Eigen::Index>(k)) = tensors[k].values;
  }
  set.params = params;
  set.shape = shape;
  set.units = tensors.front().units;
  return set;
}

SnapshotSet subset(const SnapshotSet& set, const std::vector<int>& indices) {
  SnapshotSet out;
  out.y_hat.resize(set.y_hat.rows(), static_cast<Eigen::Index>(indices.size()));
  out.params.resize(static_cast<Eigen::Index>(indices.size()), set.params.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.y_hat.col(static_cast<Eigen::Index>(k)) = set.y_hat.col(indices[k]);
    out.params.row(static_cast<Eigen::Index>(k)) = set.params.row(indices[k]);
  }
  out.shape = set.shape;
  out.units = set.units;
  return out;
}

TruncationRule TruncationRule::fixed_rank(int r) {
  if (r < 1) throw std::invalid_argument("TruncationRule: rank must be >= 1");
  return {Kind::fixed_rank, static_cast<double>(r)};
}

TruncationRule TruncationRule::sv_cutoff(double tau_cut) {
  if (tau_cut <= 0.0 || tau_cut >= 1.0) {
    throw std::invalid_argument("TruncationRule: tau_cut must be in (0, 1)");
  }
  return {Kind::sv_cutoff, tau_cut};
}

TruncationRule TruncationRule::energy(double tau) {
  if (tau <= 0.0 || tau >= 1.0) {
    throw std::invalid_argument("TruncationRule: tau must be in (0, 1)");
  }
  return {Kind::energy, tau};
}

int select_rank(const Vector& singular_values, const TruncationRule& rule) {
  const int m = static_cast<int>(singular_values.size());
  if (m == 0 || singular_values[0] <= 0.0) {
    throw std::invalid_argument("select_rank: all-zero spectrum");
  }
  switch (rule.kind) {
    case TruncationRule::Kind::fixed_rank: {
      const int r = static_cast<int>(rule.value);
      if (r < 1 || r > m) {
        throw std::invalid_argument("select_rank: fixed rank " + std::to_string(r) +
                                    " outside [1, " + std::to_string(m) + "]");
      }
      return r;
    }
    case TruncationRule::Kind::sv_cutoff: {
      for (int r = 0; r < m; ++r) {
        if (singular_values[r] / singular_values[0] < rule.value) {
          return std::max(1, r);
        }
      }
      return m;
    }
    case TruncationRule::Kind::energy: {
      const double total = singular_values.squaredNorm();
      double partial = 0.0;
      for (int r = 0; r < m; ++r) {
        partial += singular_values[r] * singular_values[r];
        if (partial / total >= 1.0 - rule.value) return r + 1;
      }
      return m;
    }
  }
  throw std::logic_error("select_rank: unknown rule");
}

PodBasis fit_pod(const SnapshotSet& set, const TruncationRule& rule) {
  const SvdResult dec = svd(set.y_hat);
  PodBasis basis;
  basis.singular_values = dec.singular_values;
  basis.rank = select_rank(dec.singular_values, rule);
  basis.modes = dec.u.leftCols(basis.rank);
  // a = Sigma_r V_r^T
  basis.coordinates = dec.singular_values.head(basis.rank).asDiagonal() *
                      dec.v.leftCols(basis.rank).transpose();
  return basis;
}

double tps_kernel(double r) {
  if (r < 0.0) throw std::invalid_argument("tps_kernel: r must be >= 0");
  if (r == 0.0) return 0.0;
  return r * r * std::log(r);
}

Vector RbfInterpolantSet::evaluate(const Vector& x_scaled) const {
  const Eigen::Index m = nodes.rows();
  const Eigen::Index d = nodes.cols();
  Vector basis(m + d + 1);
  for (Eigen::Index k = 0; k < m; ++k) {
    basis[k] = tps_kernel((nodes.row(k).transpose() - x_scaled).norm());
  }
  basis[m] = 1.0;
  basis.segment(m + 1, d) = x_scaled;
  return weights.transpose() * basis;
}

Vector RomModel::scale(const Vector& mu) const {
  Vector x(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double width = scale_hi[j] - scale_lo[j];
    x[j] = width > 0.0 ? (mu[j] - scale_lo[j]) / width : 0.5;
  }
  return x;
}

RomModel train(const SnapshotSet& set, const TruncationRule& rule) {
  const int m = set.n_snapshots();
  const int d = set.n_params();
  if (m < d + 2) {
    throw std::invalid_argument("train: need at least d + 2 = " + std::to_string(d + 2) +
                                " snapshots, got " + std::to_string(m));
  }

  RomModel model;
  model.basis = fit_pod(set, rule);
  model.training_params = set.params;
  model.shape = set.shape;
  model.units = set.units;
  model.scale_lo = set.params.colwise().minCoeff();
  model.scale_hi = set.params.colwise().maxCoeff();

  DenseMatrix nodes(m, d);
  for (int k = 0; k < m; ++k) {
    nodes.row(k) = model.scale(set.params.row(k).transpose()).transpose();
  }
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if ((nodes.row(a) - nodes.row(b)).norm() < 1e-14) {
        std::ostringstream msg;
        msg << "train: duplicate training points " << a << " and " << b;
        throw std::invalid_argument(msg.str());
      }
    }
  }

  // TPS system with degree-1 tail and the usual orthogonality side conditions:
  // [K P; P^T 0] [w; c] = [a_i; 0] for every mode at once.
  const int n = m + d + 1;
  DenseMatrix system = DenseMatrix::Zero(n, n);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      system(a, b) = tps_kernel((nodes.row(a) - nodes.row(b)).norm());
    }
    system(a, m) = 1.0;
    system(m, a) = 1.0;
    system.block(a, m + 1, 1, d) = nodes.row(a);
    system.block(m + 1, a, d, 1) = nodes.row(a).transpose();
  }

  DenseMatrix rhs = DenseMatrix::Zero(n, model.basis.rank);
  rhs.topRows(m) = model.basis.coordinates.transpose();

  Eigen::PartialPivLU<DenseMatrix> lu(system);
  DenseMatrix weights = lu.solve(rhs);
  const double residual = (system * weights - rhs).norm();
  const double scale = rhs.norm() > 0.0 ? rhs.norm() : 1.0;
  if (!weights.allFinite() || residual > 1e-6 * scale) {
    throw std::runtime_error("train: singular interpolation system (residual " +
                             std::to_string(residual / scale) + ")");
  }

  model.interpolants.nodes = std::move(nodes);
  model.interpolants.weights = std::move(weights);
  return model;
}

Vector predict_coordinates(const RomModel& model, const Vector& mu) {
  if (mu.size() != model.training_params.cols()) {
    throw std::invalid_argument("predict: parameter dimension " + std::to_string(mu.size()) +
                                " != " + std::to_string(model.training_params.cols()));
  }
  return model.interpolants.evaluate(model.scale(mu));
}

Prediction predict(const RomModel& model, const Vector& mu) {
  const Vector coords = predict_coordinates(model, mu);
  Prediction out;
  out.qoi.values = model.basis.modes * coords;
  out.qoi.shape = model.shape;
  out.qoi.units = model.units;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    if (mu[j] < model.scale_lo[j] || mu[j] > model.scale_hi[j]) out.extrapolated = true;
  }
  return out;
}

double compression_fraction(const RomModel& model, const SnapshotSet& set) {
  const double dim = static_cast<double>(set.y_hat.rows());
  const double m = set.n_snapshots();
  const double d = set.n_params();
  const double r = model.rank();
  return (r * (dim + m) + d * m) / (m * dim);
}

ReconstructionErrors reconstruction_error(const SnapshotSet& set, const PodBasis& basis) {
  ReconstructionErrors err;
  const int m = set.n_snapshots();
  err.per_snapshot.resize(m);
  double num2 = 0.0;
  double den2 = 0.0;
  for (int k = 0; k < m; ++k) {
    const Vector& x = set.y_hat.col(k);
    const double xnorm = x.norm();
    if (xnorm == 0.0) {
      throw std::invalid_argument("reconstruction_error: snapshot " + std::to_string(k) +
                                  " has zero norm");
    }
    const Vector residual = x - basis.modes * (basis.modes.transpose() * x);
    err.per_snapshot[k] = residual.norm() / xnorm;
    num2 += residual.squaredNorm();
    den2 += x.squaredNorm();
  }
  err.mean = err.per_snapshot.mean();
  err.max = err.per_snapshot.maxCoeff();
  err.aggregate = std::sqrt(num2 / den2);
  return err;
}

}  // namespace podmci
