#pragma once

#include "podmci/numerics.hpp"

#include <string>
#include <vector>

namespace podmci {

// One flattened quantity-of-interest tensor for one parameter point. Shape is
// kept for unflattening; flattening order is C-style with the last axis
// fastest (time, node, component for full fields).
struct QoiTensor {
  Vector values;
  std::vector<int> shape;
  std::string units;

  int size() const { return static_cast<int>(values.size()); }
};

// Training snapshots stacked column-wise; column k belongs to parameter row k.
struct SnapshotSet {
  DenseMatrix y_hat;       // flattened dim x M
  DenseMatrix params;      // M x d
  std::vector<int> shape;  // per-snapshot tensor shape
  std::string units;

  int n_snapshots() const { return static_cast<int>(y_hat.cols()); }
  int n_params() const { return static_cast<int>(params.cols()); }
};

SnapshotSet stack_snapshots(const std::vector<QoiTensor>& tensors, const DenseMatrix& params);

// Extracts the subset of columns (and parameter rows) with the given indices.
SnapshotSet subset(const SnapshotSet& set, const std::vector<int>& indices);

struct TruncationRule {
  enum class Kind { fixed_rank, sv_cutoff, energy };
  Kind kind = Kind::energy;
  double value = 1e-8;

  static TruncationRule fixed_rank(int r);
  static TruncationRule sv_cutoff(double tau_cut);
  static TruncationRule energy(double tau);
};

// Rank selection on a descending spectrum: fixed rank as given; sv_cutoff
// keeps the modes with sigma_r / sigma_1 >= tau_cut (all M when none falls
// below); energy keeps the fewest modes whose squared singular values reach
// the fraction 1 - tau of the total.
int select_rank(const Vector& singular_values, const TruncationRule& rule);

struct PodBasis {
  DenseMatrix modes;        // dim x r, orthonormal columns
  Vector singular_values;   // all min(dim, M) values, descending
  int rank = 0;
  DenseMatrix coordinates;  // r x M, Sigma_r V_r^T
};

PodBasis fit_pod(const SnapshotSet& set, const TruncationRule& rule);

// Thin-plate spline kernel r^2 log r with the limit value 0 at r = 0.
double tps_kernel(double r);

// Shared-node TPS interpolants with a degree-1 polynomial tail, one weight
// column per POD mode. Nodes are stored in scaled coordinates.
struct RbfInterpolantSet {
  DenseMatrix nodes;    // M x d
  DenseMatrix weights;  // (M + d + 1) x r; RBF weights then [1, x_1..x_d] tail

  int count() const { return static_cast<int>(weights.cols()); }
  Vector evaluate(const Vector& x_scaled) const;
};

struct RomModel {
  PodBasis basis;
  RbfInterpolantSet interpolants;
  Vector scale_lo, scale_hi;   // per-dimension training bounds
  DenseMatrix training_params; // M x d, unscaled
  std::vector<int> shape;
  std::string units;

  int rank() const { return basis.rank; }
  Vector scale(const Vector& mu) const;
};

RomModel train(const SnapshotSet& set, const TruncationRule& rule);

struct Prediction {
  QoiTensor qoi;
  bool extrapolated = false;  // query outside the training bounding box
};

Prediction predict(const RomModel& model, const Vector& mu);

// Interpolated coordinates only; cheap path for scalar QoI sweeps.
Vector predict_coordinates(const RomModel& model, const Vector& mu);

double compression_fraction(const RomModel& model, const SnapshotSet& set);

struct ReconstructionErrors {
  Vector per_snapshot;  // relative l2 per column
  double mean = 0.0;
  double max = 0.0;
  double aggregate = 0.0;  // relative Frobenius over the whole set
};

ReconstructionErrors reconstruction_error(const SnapshotSet& set, const PodBasis& basis);

}  // namespace podmci
