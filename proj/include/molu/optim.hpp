#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace molu {

class Mlp;
class MlpGradients;

enum class OptimizerKind { SgdMomentum, Adam };

/// Hyperparameters plus per-parameter buffers. Buffers are sized on the first
/// step and must keep matching the parameter shapes afterwards.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::SgdMomentum;
  double learning_rate = 0.001;
  double momentum = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  std::vector<std::vector<double>> first;   // SGD velocity or Adam m
  std::vector<std::vector<double>> second;  // Adam v
  std::uint64_t step_count = 0;

  static OptimizerState sgd(double learning_rate, double momentum);
  static OptimizerState adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                             double epsilon = 1e-8);
};

using ParamViews = std::vector<std::span<double>>;
using GradViews = std::vector<std::span<const double>>;

/// v <- momentum*v + g; p <- p - lr*v.
void sgd_momentum_step(const ParamViews& params, const GradViews& grads, OptimizerState& state);

/// Adam with bias correction:
/// p <- p - lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(const ParamViews& params, const GradViews& grads, OptimizerState& state);

void optimizer_step(const ParamViews& params, const GradViews& grads, OptimizerState& state);
void optimizer_step(Mlp& model, const MlpGradients& grads, OptimizerState& state);

}  // namespace molu
