#include "podmci/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace podmci {

namespace {

// Bounded uniform integers and unit doubles built directly on mt19937_64
// output so streams are identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fisher_yates(std::vector<int>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace

void ParameterSpace::validate() const {
  for (const auto& dim : dims) {
    if (!(dim.lo < dim.hi)) {
      throw std::invalid_argument("ParameterSpace: dimension " + dim.name +
                                  " needs lo < hi");
    }
  }
}

double relative_l2(const QoiTensor& pred, const QoiTensor& truth) {
  if (pred.shape != truth.shape || pred.size() != truth.size()) {
    throw std::invalid_argument("relative_l2: shape mismatch");
  }
  const double denom = truth.values.norm();
  if (denom == 0.0) throw std::invalid_argument("relative_l2: zero-norm truth");
  return (pred.values - truth.values).norm() / denom;
}

DenseMatrix tensor_product_sample(const ParameterSpace& space, int points_per_dim) {
  space.validate();
  if (points_per_dim < 2) {
    throw std::invalid_argument("tensor_product_sample: need >= 2 points per dimension");
  }
  const int d = space.size();
  int total = 1;
  for (int j = 0; j < d; ++j) total *= points_per_dim;

  DenseMatrix points(total, d);
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    for (int j = d - 1; j >= 0; --j) {
      const int step = rest % points_per_dim;
      rest /= points_per_dim;
      const auto& dim = space.dims[j];
      points(idx, j) = dim.lo + (dim.hi - dim.lo) * step / (points_per_dim - 1);
    }
  }
  return points;
}

DenseMatrix random_sample(const ParameterSpace& space, int n, std::uint64_t seed) {
  for (const auto& dim : space.dims) {
    if (dim.lo > dim.hi) {
      throw std::invalid_argument("random_sample: dimension " + dim.name + " has lo > hi");
    }
  }
  if (n < 1) throw std::invalid_argument("random_sample: n must be >= 1");
  std::mt19937_64 rng(seed);
  DenseMatrix points(n, space.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < space.size(); ++j) {
      const auto& dim = space.dims[j];
      points(i, j) = dim.lo + (dim.hi - dim.lo) * uniform_unit(rng);
    }
  }
  return points;
}

std::vector<Split> kfold_splits(int n, int k, int repeats, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw std::invalid_argument("kfold_splits: need 2 <= k <= n, got k = " +
                                std::to_string(k) + ", n = " + std::to_string(n));
  }
  if (repeats < 1) throw std::invalid_argument("kfold_splits: repeats must be >= 1");

  std::mt19937_64 rng(seed);
  std::vector<Split> splits;
  splits.reserve(static_cast<std::size_t>(k) * repeats);
  for (int rep = 0; rep < repeats; ++rep) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    fisher_yates(order, rng);

    const int base = n / k;
    const int extra = n % k;
    int offset = 0;
    for (int fold = 0; fold < k; ++fold) {
      const int size = base + (fold < extra ? 1 : 0);
      Split split;
      split.repeat = rep;
      split.fold = fold;
      split.test.assign(order.begin() + offset, order.begin() + offset + size);
      split.train.reserve(n - size);
      for (int i = 0; i < n; ++i) {
        if (i < offset || i >= offset + size) split.train.push_back(order[i]);
      }
      std::sort(split.test.begin(), split.test.end());
      std::sort(split.train.begin(), split.train.end());
      splits.push_back(std::move(split));
      offset += size;
    }
  }
  return splits;
}

double CrossValidationReport::FoldResult::mean_error() const {
  return std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
}

double CrossValidationReport::FoldResult::max_error() const {
  return *std::max_element(errors.begin(), errors.end());
}

std::vector<double> CrossValidationReport::all_errors() const {
  std::vector<double> all;
  for (const auto& fold : folds) all.insert(all.end(), fold.errors.begin(), fold.errors.end());
  return all;
}

double CrossValidationReport::mean() const {
  const auto all = all_errors();
  return std::accumulate(all.begin(), all.end(), 0.0) / all.size();
}

double CrossValidationReport::max() const {
  const auto all = all_errors();
  return *std::max_element(all.begin(), all.end());
}

double CrossValidationReport::min() const {
  const auto all = all_errors();
  return *std::min_element(all.begin(), all.end());
}

CrossValidationReport cross_validate(const SnapshotSet& set, const TruncationRule& rule,
                                     const std::vector<Split>& splits) {
  CrossValidationReport report;
  for (const Split& split : splits) {
    CrossValidationReport::FoldResult result;
    result.repeat = split.repeat;
    result.fold = split.fold;
    result.test_indices = split.test;
    RomModel model;
    try {
      model = train(subset(set, split.train), rule);
    } catch (const std::exception& err) {
      throw std::runtime_error("cross_validate: training failed in repeat " +
                               std::to_string(split.repeat) + " fold " +
                               std::to_string(split.fold) + ": " + err.what());
    }
    for (int idx : split.test) {
      const Prediction pred = predict(model, set.params.row(idx).transpose());
      QoiTensor truth{set.y_hat.col(idx), set.shape, set.units};
      result.errors.push_back(relative_l2(pred.qoi, truth));
    }
    report.folds.push_back(std::move(result));
  }
  return report;
}

CrossValidationReport loocv(const SnapshotSet& set, const TruncationRule& rule) {
  const int m = set.n_snapshots();
  const int d = set.n_params();
  if (m < d + 3) {
    throw std::invalid_argument("loocv: need at least d + 3 snapshots so folds stay trainable");
  }
  std::vector<Split> splits;
  for (int i = 0; i < m; ++i) {
    Split split;
    split.repeat = 0;
    split.fold = i;
    split.test = {i};
    for (int j = 0; j < m; ++j) {
      if (j != i) split.train.push_back(j);
    }
    splits.push_back(std::move(split));
  }
  CrossValidationReport report = cross_validate(set, rule, splits);
  report.k = m;
  report.repeats = 1;
  return report;
}

}  // namespace podmci
