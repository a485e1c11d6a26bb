#include "qjumps/stats.hpp"

#include <algorithm>
#include <cmath>

namespace qjumps {

void MeanAccumulator::add(double v) {
  ++n_;
  const double delta = v - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (v - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n_ + other.n_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.n_) / total;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
  n_ += other.n_;
}

double MeanAccumulator::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double MeanAccumulator::standard_error() const {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

namespace {

void add_blocks(std::span<const double> series, std::size_t block, MeanAccumulator& blocks,
                MeanAccumulator& all) {
  block = std::max<std::size_t>(block, 1);
  for (double v : series) all.add(v);
  const std::size_t full = series.size() / block;
  for (std::size_t b = 0; b < full; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < block; ++i) s += series[b * block + i];
    blocks.add(s / static_cast<double>(block));
  }
}

MeanEstimate finish(const MeanAccumulator& blocks, const MeanAccumulator& all) {
  MeanEstimate out;
  out.mean = all.mean();
  out.count = all.count();
  out.standard_error = blocks.count() >= 2 ? blocks.standard_error() : all.standard_error();
  return out;
}

}  // namespace

MeanEstimate blocked_mean(std::span<const double> series, std::size_t block) {
  MeanAccumulator blocks, all;
  add_blocks(series, block, blocks, all);
  return finish(blocks, all);
}

MeanEstimate blocked_mean(const std::vector<std::vector<double>>& series, std::size_t block) {
  MeanAccumulator blocks, all;
  for (const auto& s : series) add_blocks(s, block, blocks, all);
  return finish(blocks, all);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace qjumps
