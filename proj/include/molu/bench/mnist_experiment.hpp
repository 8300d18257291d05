#pragma once

#include <functional>
#include <vector>

#include "molu/bench/config.hpp"
#include "molu/datasets.hpp"
#include "molu/nn.hpp"

namespace molu::bench {

struct MnistEpochRecord {
  std::size_t epoch = 0;  // 1-based: metrics after this many passes
  double train_loss = 0.0;      // mean mini-batch loss over the epoch
  double train_accuracy = 0.0;  // running top-1 over the epoch's batches
  double test_top1 = 0.0;
  double test_top5 = 0.0;
};

struct MnistRun {
  ActivationSpec activation;
  std::vector<MnistEpochRecord> records;
  Mlp model;
};

/// Logits for `images` evaluated in chunks.
Matrix predict_logits(const Mlp& model, const Matrix& images, std::size_t chunk = 1000);

/// Classifier [784, hidden..., 10] trained with mini-batch SGD + momentum.
/// Batch order comes from a dedicated PRNG stream of cfg.seed, so the run is
/// a pure function of (cfg, activation, data).
MnistRun train_mnist(const MnistExperimentConfig& cfg, const ActivationSpec& activation,
                     const data::MnistData& data,
                     const std::function<void(const MnistEpochRecord&)>& on_epoch = {});

}  // namespace molu::bench
