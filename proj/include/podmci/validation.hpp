#pragma once

#include "podmci/rom.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace podmci {

struct ParameterSpace {
  struct Dimension {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    std::string units;
  };
  std::vector<Dimension> dims;

  int size() const { return static_cast<int>(dims.size()); }
  void validate() const;
};

// ||pred - truth||_2 / ||truth||_2 over the flattened tensors.
double relative_l2(const QoiTensor& pred, const QoiTensor& truth);

// Endpoint-inclusive Cartesian grid, last dimension fastest. Rows are points.
DenseMatrix tensor_product_sample(const ParameterSpace& space, int points_per_dim);

// Uniform i.i.d. points in the box; reproducible from the seed with a
// portable generator (mt19937_64 with 53-bit mantissa draws).
DenseMatrix random_sample(const ParameterSpace& space, int n, std::uint64_t seed);

struct Split {
  int repeat = 0;
  int fold = 0;
  std::vector<int> train;
  std::vector<int> test;
};

// Repeated k-fold partitions: per repeat one shuffled partition into k
// near-equal folds (the first n mod k folds get the extra element), each fold
// serving as test once. Reproducible from the seed.
std::vector<Split> kfold_splits(int n, int k, int repeats, std::uint64_t seed);

struct CrossValidationReport {
  struct FoldResult {
    int repeat = 0;
    int fold = 0;
    std::vector<int> test_indices;
    std::vector<double> errors;  // relative l2 per held-out snapshot

    double mean_error() const;
    double max_error() const;
  };
  std::vector<FoldResult> folds;
  std::uint64_t seed = 0;
  int k = 0;
  int repeats = 0;

  std::vector<double> all_errors() const;
  double mean() const;
  double max() const;
  double min() const;
};

// Trains one ROM per split on the training columns and records the held-out
// prediction errors.
CrossValidationReport cross_validate(const SnapshotSet& set, const TruncationRule& rule,
                                     const std::vector<Split>& splits);

// k-fold with k = M: every snapshot held out once, in index order.
CrossValidationReport loocv(const SnapshotSet& set, const TruncationRule& rule);

}  // namespace podmci
