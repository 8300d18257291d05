#include "molu/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace molu {
namespace {

void check_labels(const Matrix& logits, std::span<const std::uint32_t> labels) {
  if (labels.size() != logits.rows())
    throw ShapeError("label count " + std::to_string(labels.size()) + " does not match " +
                     std::to_string(logits.rows()) + " rows");
  for (std::uint32_t y : labels)
    if (y >= logits.cols())
      throw std::out_of_range("label " + std::to_string(y) + " out of range for " +
                              std::to_string(logits.cols()) + " classes");
}

}  // namespace

LossResult mse_loss(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ShapeError("mse_loss: " + shape_string(pred) + " vs " + shape_string(target));
  if (pred.empty()) throw ShapeError("mse_loss: empty input");

  const double n = static_cast<double>(pred.size());
  LossResult r{0.0, Matrix(pred.rows(), pred.cols())};
  auto p = pred.data();
  auto t = target.data();
  auto g = r.grad.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    r.loss += d * d;
    g[i] = 2.0 * d / n;
  }
  r.loss /= n;
  return r;
}

LossResult softmax_cross_entropy(const Matrix& logits, std::span<const std::uint32_t> labels) {
  check_labels(logits, labels);
  if (logits.rows() == 0) throw ShapeError("softmax_cross_entropy: empty batch");

  const double batch = static_cast<double>(logits.rows());
  LossResult r{0.0, Matrix(logits.rows(), logits.cols())};
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto z = logits.row_span(i);
    auto g = r.grad.row_span(i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      g[c] = std::exp(z[c] - zmax);
      sum += g[c];
    }
    r.loss += std::log(sum) - (z[labels[i]] - zmax);
    for (std::size_t c = 0; c < z.size(); ++c) g[c] /= sum;
    g[labels[i]] -= 1.0;
    for (double& v : g) v /= batch;
  }
  r.loss /= batch;
  return r;
}

double topk_accuracy(const Matrix& logits, std::span<const std::uint32_t> labels, std::size_t k) {
  check_labels(logits, labels);
  if (k == 0 || k > logits.cols())
    throw std::out_of_range("topk_accuracy: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(logits.cols()) + "]");
  if (logits.rows() == 0) return 0.0;

  std::size_t hits = 0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto z = logits.row_span(i);
    const std::uint32_t y = labels[i];
    // Rank of y = number of classes ordered before it.
    std::size_t ahead = 0;
    for (std::size_t c = 0; c < z.size(); ++c)
      if (z[c] > z[y] || (z[c] == z[y] && c < y)) ++ahead;
    if (ahead < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(logits.rows());
}

}  // namespace molu
