#include "molu/bench/mnist_experiment.hpp"

#include <algorithm>

#include "molu/loss.hpp"
#include "molu/optim.hpp"
#include "molu/prng.hpp"

namespace molu::bench {
namespace {

constexpr std::size_t kClasses = 10;

Matrix gather_rows(const Matrix& src, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), src.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto from = src.row_span(idx[i]);
    std::copy(from.begin(), from.end(), out.row_span(i).begin());
  }
  return out;
}

}  // namespace

Matrix predict_logits(const Mlp& model, const Matrix& images, std::size_t chunk) {
  Matrix logits(images.rows(), model.out_dim());
  for (std::size_t start = 0; start < images.rows(); start += chunk) {
    const std::size_t end = std::min(images.rows(), start + chunk);
    Matrix block(end - start, images.cols());
    for (std::size_t r = start; r < end; ++r) {
      auto from = images.row_span(r);
      std::copy(from.begin(), from.end(), block.row_span(r - start).begin());
    }
    const Matrix out = model.forward(block);
    for (std::size_t r = start; r < end; ++r) {
      auto from = out.row_span(r - start);
      std::copy(from.begin(), from.end(), logits.row_span(r).begin());
    }
  }
  return logits;
}

MnistRun train_mnist(const MnistExperimentConfig& cfg, const ActivationSpec& activation,
                     const data::MnistData& data,
                     const std::function<void(const MnistEpochRecord&)>& on_epoch) {
  const std::size_t n = data.train_images.rows();
  std::vector<std::size_t> dims{data.train_images.cols()};
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(kClasses);

  MnistRun run;
  run.activation = activation;
  run.model = init_mlp(dims, activation, cfg.seed);
  OptimizerState opt = OptimizerState::sgd(cfg.learning_rate, cfg.momentum);
  data::SeededPrng shuffle(cfg.seed, data::streams::kShuffle);
  MlpGradients grads(run.model);
  MlpCache cache;
  std::vector<std::uint32_t> batch_labels;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t correct = 0;
    const auto batches = data::shuffled_batches(n, cfg.batch_size, shuffle);
    for (const auto& idx : batches) {
      const Matrix x = gather_rows(data.train_images, idx);
      batch_labels.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) batch_labels[i] = data.train_labels[idx[i]];

      const Matrix logits = run.model.forward(x, cache);
      const LossResult l = softmax_cross_entropy(logits, batch_labels);
      loss_sum += l.loss;
      correct += static_cast<std::size_t>(
          topk_accuracy(logits, batch_labels, 1) * static_cast<double>(idx.size()) + 0.5);
      grads.zero();
      run.model.backward(cache, l.grad, grads, /*need_input_grad=*/false);
      optimizer_step(run.model, grads, opt);
    }

    const Matrix test_logits = predict_logits(run.model, data.test_images);
    MnistEpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    rec.test_top1 = topk_accuracy(test_logits, data.test_labels, 1);
    rec.test_top5 = topk_accuracy(test_logits, data.test_labels, 5);
    run.records.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return run;
}

}  // namespace molu::bench
