#include "molu/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "molu/matrix.hpp"
#include "molu/nn.hpp"

namespace molu {
namespace {

void ensure_buffers(std::vector<std::vector<double>>& buffers, const ParamViews& params) {
  if (buffers.empty()) {
    for (const auto& p : params) buffers.emplace_back(p.size(), 0.0);
    return;
  }
  if (buffers.size() != params.size())
    throw ShapeError("optimizer: parameter list changed between steps");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (buffers[i].size() != params[i].size())
      throw ShapeError("optimizer: parameter " + std::to_string(i) + " changed shape");
}

void check_pairing(const ParamViews& params, const GradViews& grads) {
  if (params.size() != grads.size())
    throw ShapeError("optimizer: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].size() != grads[i].size())
      throw ShapeError("optimizer: gradient " + std::to_string(i) + " shape mismatch");
}

}  // namespace

OptimizerState OptimizerState::sgd(double learning_rate, double momentum) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw std::invalid_argument("momentum must lie in [0, 1)");
  OptimizerState s;
  s.kind = OptimizerKind::SgdMomentum;
  s.learning_rate = learning_rate;
  s.momentum = momentum;
  return s;
}

OptimizerState OptimizerState::adam(double learning_rate, double beta1, double beta2,
                                    double epsilon) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  OptimizerState s;
  s.kind = OptimizerKind::Adam;
  s.learning_rate = learning_rate;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

void sgd_momentum_step(const ParamViews& params, const GradViews& grads, OptimizerState& state) {
  check_pairing(params, grads);
  ensure_buffers(state.first, params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& v = state.first[i];
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = state.momentum * v[j] + grads[i][j];
      params[i][j] -= state.learning_rate * v[j];
    }
  }
  ++state.step_count;
}

void adam_step(const ParamViews& params, const GradViews& grads, OptimizerState& state) {
  check_pairing(params, grads);
  ensure_buffers(state.first, params);
  ensure_buffers(state.second, params);
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.first[i];
    auto& v = state.second[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double g = grads[i][j];
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      params[i][j] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void optimizer_step(const ParamViews& params, const GradViews& grads, OptimizerState& state) {
  if (state.kind == OptimizerKind::Adam)
    adam_step(params, grads, state);
  else
    sgd_momentum_step(params, grads, state);
}

void optimizer_step(Mlp& model, const MlpGradients& grads, OptimizerState& state) {
  optimizer_step(model.parameter_views(), grads.views(), state);
}

}  // namespace molu
