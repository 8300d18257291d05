#include "molu/nn.hpp"

#include <cmath>
#include <string>

#include "molu/prng.hpp"

namespace molu {

Matrix apply_activation(const std::optional<ActivationSpec>& act, const Matrix& z) {
  if (!act) return z;
  act->validate();
  Matrix y(z.rows(), z.cols());
  auto in = z.data();
  auto out = y.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = activation_value(*act, in[i]);
  return y;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x, DenseCache* cache) {
  if (x.cols() != layer.in_dim())
    throw ShapeError("dense_forward: input has " + std::to_string(x.cols()) +
                     " columns, layer expects " + std::to_string(layer.in_dim()));
  if (layer.bias.size() != layer.out_dim())
    throw ShapeError("dense_forward: bias length does not match weight rows");

  Matrix z = matmul_bt(x, layer.weights);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row_span(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
  }
  Matrix y = apply_activation(layer.activation, z);
  if (cache) {
    cache->input = x;
    cache->pre_activation = std::move(z);
  }
  return y;
}

DenseBackward dense_backward(const DenseLayer& layer, const DenseCache& cache, const Matrix& dy,
                             bool need_input_grad) {
  const Matrix& z = cache.pre_activation;
  if (dy.rows() != z.rows() || dy.cols() != z.cols())
    throw ShapeError("dense_backward: dy is " + shape_string(dy) + ", expected " +
                     shape_string(z));
  if (cache.input.cols() != layer.in_dim() || z.cols() != layer.out_dim())
    throw ShapeError("dense_backward: cache does not belong to this layer");

  Matrix dz = dy;
  if (layer.activation) {
    auto g = dz.data();
    auto pre = z.data();
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] *= activation_derivative(*layer.activation, pre[i]);
  }

  DenseBackward out;
  out.grads.d_weights = matmul_at(dz, cache.input);
  out.grads.d_bias.assign(layer.out_dim(), 0.0);
  for (std::size_t r = 0; r < dz.rows(); ++r) {
    auto row = dz.row_span(r);
    for (std::size_t c = 0; c < row.size(); ++c) out.grads.d_bias[c] += row[c];
  }
  if (need_input_grad) out.d_input = matmul(dz, layer.weights);
  return out;
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("Mlp: no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& l = layers_[k];
    if (l.bias.size() != l.out_dim())
      throw ShapeError("Mlp: layer " + std::to_string(k) + " bias length mismatch");
    if (k > 0 && l.in_dim() != layers_[k - 1].out_dim())
      throw ShapeError("Mlp: layer " + std::to_string(k) + " input does not chain");
    if (l.activation) l.activation->validate();
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

Matrix Mlp::forward(const Matrix& x) const {
  Matrix h = x;
  for (const auto& l : layers_) h = dense_forward(l, h);
  return h;
}

Matrix Mlp::forward(const Matrix& x, MlpCache& cache) const {
  cache.layers.resize(layers_.size());
  Matrix h = x;
  for (std::size_t k = 0; k < layers_.size(); ++k) h = dense_forward(layers_[k], h, &cache.layers[k]);
  return h;
}

Matrix Mlp::backward(const MlpCache& cache, const Matrix& dy, MlpGradients& grads,
                     bool need_input_grad) const {
  if (cache.layers.size() != layers_.size() || grads.layers().size() != layers_.size())
    throw ShapeError("Mlp::backward: cache or gradient buffers do not match the model");
  Matrix g = dy;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const bool want_dx = k > 0 || need_input_grad;
    DenseBackward b = dense_backward(layers_[k], cache.layers[k], g, want_dx);
    auto dst_w = grads.layers()[k].d_weights.data();
    auto src_w = b.grads.d_weights.data();
    for (std::size_t i = 0; i < dst_w.size(); ++i) dst_w[i] += src_w[i];
    auto& dst_b = grads.layers()[k].d_bias;
    for (std::size_t i = 0; i < dst_b.size(); ++i) dst_b[i] += b.grads.d_bias[i];
    g = std::move(b.d_input);
  }
  return g;
}

std::vector<std::span<double>> Mlp::parameter_views() {
  std::vector<std::span<double>> v;
  for (auto& l : layers_) {
    v.push_back(l.weights.data());
    v.push_back(l.bias);
  }
  return v;
}

std::vector<std::span<const double>> Mlp::parameter_views() const {
  std::vector<std::span<const double>> v;
  for (const auto& l : layers_) {
    v.push_back(l.weights.data());
    v.push_back(l.bias);
  }
  return v;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t k = 0; k < a.layers_.size(); ++k) {
    const auto& x = a.layers_[k];
    const auto& y = b.layers_[k];
    if (x.weights != y.weights || x.bias != y.bias) return false;
    if (x.activation.has_value() != y.activation.has_value()) return false;
    if (x.activation && (x.activation->kind != y.activation->kind ||
                         x.activation->alpha != y.activation->alpha ||
                         x.activation->beta != y.activation->beta ||
                         x.activation->leaky_slope != y.activation->leaky_slope))
      return false;
  }
  return true;
}

MlpGradients::MlpGradients(const Mlp& model) {
  for (const auto& l : model.layers())
    layers_.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)});
}

void MlpGradients::zero() {
  for (auto& g : layers_) {
    g.d_weights.fill(0.0);
    std::fill(g.d_bias.begin(), g.d_bias.end(), 0.0);
  }
}

bool MlpGradients::all_finite() const {
  for (const auto& g : layers_) {
    if (!g.d_weights.all_finite()) return false;
    for (double v : g.d_bias)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

std::vector<std::span<const double>> MlpGradients::views() const {
  std::vector<std::span<const double>> v;
  for (const auto& g : layers_) {
    v.push_back(g.d_weights.data());
    v.push_back(g.d_bias);
  }
  return v;
}

std::vector<std::span<double>> MlpGradients::views() {
  std::vector<std::span<double>> v;
  for (auto& g : layers_) {
    v.push_back(g.d_weights.data());
    v.push_back(g.d_bias);
  }
  return v;
}

Mlp init_mlp(std::span<const std::size_t> dims, const ActivationSpec& activation,
             std::uint64_t seed) {
  if (dims.size() < 2) throw ShapeError("init_mlp: need at least input and output dims");
  for (std::size_t d : dims)
    if (d == 0) throw ShapeError("init_mlp: zero-width layer");
  activation.validate();

  data::SeededPrng prng(seed, data::streams::kInit);
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const std::size_t fan_in = dims[k];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    DenseLayer l;
    l.weights = Matrix(dims[k + 1], fan_in);
    for (double& w : l.weights.data()) w = prng.uniform(-bound, bound);
    l.bias.assign(dims[k + 1], 0.0);
    if (k + 2 < dims.size()) l.activation = activation;
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers));
}

}  // namespace molu
