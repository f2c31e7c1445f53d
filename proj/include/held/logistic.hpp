// Binary logistic regression trained by seeded mini-batch gradient descent on
// cross-entropy. Shared by the put-or-skip scorer and the heading classifier.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "held/core.hpp"

namespace held {

/// Row-major dense design matrix with a binary label per row.
class Dataset {
 public:
  explicit Dataset(std::size_t cols = 0) : cols_(cols) {}

  void add(std::span<const double> x, int label) {
    if (cols_ == 0 && rows() == 0) cols_ = x.size();
    if (x.size() != cols_)
      fail(ErrorCategory::model, "dataset: row has " + std::to_string(x.size()) +
                                     " features, expected " + std::to_string(cols_));
    data_.insert(data_.end(), x.begin(), x.end());
    labels_.push_back(label ? 1 : 0);
  }

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  int label(std::size_t i) const { return labels_[i]; }

 private:
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<int> labels_;
};

struct LogisticConfig {
  double learning_rate = 0.5;
  std::size_t batch_size = 256;
  int max_epochs = 150;
  int patience = 8;  // epochs without validation improvement before stopping
  double l2 = 1e-5;
  double validation_fraction = 0.1;
  double min_learning_rate = 1e-4;
  double tolerance = 1e-7;  // relative training-loss improvement treated as converged
  std::uint64_t seed = 17;
};

struct TrainingReport {
  std::vector<double> epoch_loss;       // accepted epochs only; strictly decreasing
  std::vector<double> validation_loss;  // same length, empty without a validation split
  int rejected_epochs = 0;              // epochs rolled back with a halved learning rate
  double final_learning_rate = 0.0;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(std::vector<double> weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}

  double logit(std::span<const double> x) const {
    double z = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) z += weights_[j] * x[j];
    return z;
  }
  double probability(std::span<const double> x) const { return sigmoid(logit(x)); }

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

  /// Fits on standardized features and folds the standardization back into
  /// raw-space weights. Accepted epochs strictly decrease the training loss: an
  /// epoch that would increase it is rolled back and retried at half the rate.
  static LogisticModel train(const Dataset& data, const LogisticConfig& cfg,
                             TrainingReport* report = nullptr);

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
};

namespace detail {

inline double log_loss(double p, int y) {
  constexpr double eps = 1e-12;
  p = std::clamp(p, eps, 1.0 - eps);
  return y ? -std::log(p) : -std::log1p(-p);
}

}  // namespace detail

inline LogisticModel LogisticModel::train(const Dataset& data, const LogisticConfig& cfg,
                                          TrainingReport* report) {
  const std::size_t n = data.rows(), d = data.cols();
  if (n == 0) fail(ErrorCategory::model, "training: no examples");
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) positives += static_cast<std::size_t>(data.label(i));
  if (positives == 0 || positives == n)
    fail(ErrorCategory::model, "training: degenerate single-class input (" +
                                   std::to_string(positives) + " positives of " +
                                   std::to_string(n) + ")");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t n_val = n >= 50 ? static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(n)) : 0;
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());

  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (auto i : train) {
    auto x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  }
  for (auto& m : mean) m /= static_cast<double>(train.size());
  for (auto i : train) {
    auto x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) scale[j] += (x[j] - mean[j]) * (x[j] - mean[j]);
  }
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(train.size()));
    if (s < 1e-12) s = 1.0;
  }

  std::vector<double> w(d, 0.0), z(d);
  double b = 0.0;
  auto standardized = [&](std::size_t i) {
    auto x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) z[j] = (x[j] - mean[j]) / scale[j];
  };
  auto predict = [&](std::size_t i) {
    standardized(i);
    double s = b;
    for (std::size_t j = 0; j < d; ++j) s += w[j] * z[j];
    return sigmoid(s);
  };
  auto mean_loss = [&](const std::vector<std::size_t>& rows, bool regularized) {
    double total = 0.0;
    for (auto i : rows) total += detail::log_loss(predict(i), data.label(i));
    double loss = total / static_cast<double>(rows.size());
    if (regularized) {
      double r = 0.0;
      for (double x : w) r += x * x;
      loss += 0.5 * cfg.l2 * r;
    }
    return loss;
  };

  TrainingReport rep;
  rep.train_rows = train.size();
  rep.validation_rows = val.size();
  double lr = cfg.learning_rate;
  double prev = mean_loss(train, true);
  if (!std::isfinite(prev)) fail(ErrorCategory::model, "training: initial loss is not finite");
  std::vector<double> best_w = w, saved_w;
  double best_b = b, saved_b = 0.0;
  double best_val = val.empty() ? 0.0 : mean_loss(val, false);
  int stall = 0, flat = 0;
  std::vector<double> grad(d);

  for (int epoch = 0; epoch < cfg.max_epochs;) {
    saved_w = w;
    saved_b = b;
    std::vector<std::size_t> pass = train;
    rng.shuffle(pass);
    for (std::size_t start = 0; start < pass.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(pass.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double gb = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const double err = predict(pass[k]) - data.label(pass[k]);
        for (std::size_t j = 0; j < d; ++j) grad[j] += err * z[j];
        gb += err;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t j = 0; j < d; ++j) w[j] -= lr * (grad[j] * inv + cfg.l2 * w[j]);
      b -= lr * gb * inv;
    }
    const double loss = mean_loss(train, true);
    if (!std::isfinite(loss))
      fail(ErrorCategory::model, "training: loss diverged at epoch " + std::to_string(epoch) +
                                     " (learning rate " + std::to_string(lr) + ")");
    if (loss >= prev) {
      w = saved_w;
      b = saved_b;
      lr *= 0.5;
      ++rep.rejected_epochs;
      if (lr < cfg.min_learning_rate) break;
      continue;
    }
    ++epoch;
    rep.epoch_loss.push_back(loss);
    flat = (prev - loss) < cfg.tolerance * prev ? flat + 1 : 0;
    prev = loss;
    if (!val.empty()) {
      const double vl = mean_loss(val, false);
      rep.validation_loss.push_back(vl);
      if (vl < best_val - 1e-12) {
        best_val = vl;
        best_w = w;
        best_b = b;
        stall = 0;
      } else if (++stall >= cfg.patience) {
        break;
      }
    }
    if (flat >= 3) break;
  }
  if (!val.empty()) {
    w = best_w;
    b = best_b;
  }
  rep.final_learning_rate = lr;
  if (report) *report = std::move(rep);

  std::vector<double> raw(d);
  double raw_b = b;
  for (std::size_t j = 0; j < d; ++j) {
    raw[j] = w[j] / scale[j];
    raw_b -= w[j] * mean[j] / scale[j];
  }
  return LogisticModel(std::move(raw), raw_b);
}

}  // namespace held
