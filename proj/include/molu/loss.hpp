#pragma once

#include <cstdint>
#include <span>

#include "molu/matrix.hpp"

namespace molu {

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // dLoss/dInput, same shape as the prediction
};

/// Mean of squared errors over every entry; grad = 2 (pred - target) / N.
LossResult mse_loss(const Matrix& pred, const Matrix& target);

/// Mean over rows of -log softmax(logits)[label], max-subtracted for
/// stability; grad = (softmax - onehot) / batch.
LossResult softmax_cross_entropy(const Matrix& logits, std::span<const std::uint32_t> labels);

/// Fraction of rows whose label ranks among the k largest logits. Ties rank
/// the lower class index first.
double topk_accuracy(const Matrix& logits, std::span<const std::uint32_t> labels, std::size_t k);

}  // namespace molu
