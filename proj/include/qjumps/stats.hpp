#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qjumps {

/// Welford accumulator with an associative merge.
class MeanAccumulator {
 public:
  void add(double v);
  void merge(const MeanAccumulator& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 with fewer than two values.
  double variance() const;
  /// sqrt(variance / n), valid for independent samples only.
  double standard_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Mean with a batch-means standard error: consecutive values are grouped into
/// blocks of `block` samples so serial correlation shorter than a block is absorbed.
MeanEstimate blocked_mean(std::span<const double> series, std::size_t block);

/// Combines per-trajectory series: each series contributes its own blocks.
MeanEstimate blocked_mean(const std::vector<std::vector<double>>& series, std::size_t block);

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace qjumps
