#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "molu/actfn.hpp"
#include "molu/matrix.hpp"

namespace molu {

/// y = act(x * W^T + b), applied to every row of a batch.
/// An empty `activation` means identity.
struct DenseLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;
  std::optional<ActivationSpec> activation;

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }
};

struct DenseCache {
  Matrix input;
  Matrix pre_activation;
};

struct DenseGrads {
  Matrix d_weights;
  std::vector<double> d_bias;
};

struct DenseBackward {
  Matrix d_input;  // empty when the caller did not ask for it
  DenseGrads grads;
};

Matrix dense_forward(const DenseLayer& layer, const Matrix& x, DenseCache* cache = nullptr);
DenseBackward dense_backward(const DenseLayer& layer, const DenseCache& cache, const Matrix& dy,
                             bool need_input_grad = true);

/// Applies the layer activation (or identity) elementwise.
Matrix apply_activation(const std::optional<ActivationSpec>& act, const Matrix& z);

struct MlpCache {
  std::vector<DenseCache> layers;
};

class MlpGradients;

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::size_t in_dim() const { return layers_.front().in_dim(); }
  std::size_t out_dim() const { return layers_.back().out_dim(); }
  std::size_t parameter_count() const;

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, MlpCache& cache) const;

  /// Accumulates parameter gradients into `grads` and returns dL/dx (empty
  /// when `need_input_grad` is false).
  Matrix backward(const MlpCache& cache, const Matrix& dy, MlpGradients& grads,
                  bool need_input_grad = true) const;

  /// Mutable views of every weight and bias buffer, layer by layer.
  std::vector<std::span<double>> parameter_views();
  std::vector<std::span<const double>> parameter_views() const;

  friend bool operator==(const Mlp&, const Mlp&);

 private:
  std::vector<DenseLayer> layers_;
};

/// Parameter-shaped gradient buffers for an Mlp.
class MlpGradients {
 public:
  MlpGradients() = default;
  explicit MlpGradients(const Mlp& model);

  std::vector<DenseGrads>& layers() { return layers_; }
  const std::vector<DenseGrads>& layers() const { return layers_; }

  void zero();
  bool all_finite() const;
  std::vector<std::span<const double>> views() const;
  std::vector<std::span<double>> views();

 private:
  std::vector<DenseGrads> layers_;
};

/// Layers of shape dims[k+1] x dims[k], weights uniform in +-sqrt(6/fan_in),
/// zero biases; hidden layers use `activation`, the last layer is identity.
/// Deterministic in `seed`.
Mlp init_mlp(std::span<const std::size_t> dims, const ActivationSpec& activation,
             std::uint64_t seed);

}  // namespace molu
