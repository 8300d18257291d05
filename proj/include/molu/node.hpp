#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "molu/actfn.hpp"
#include "molu/matrix.hpp"
#include "molu/nn.hpp"

namespace molu::node {

/// Non-finite state or a state beyond the blow-up threshold during
/// integration. `time` is where it was detected.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

using State = std::vector<double>;

/// du/dt written into `du`; `u` and `du` have the same length.
using VectorField = std::function<void(double t, std::span<const double> u, std::span<double> du)>;

/// du1/dt = a*u1 - b*u1*u2, du2/dt = d*u1*u2 - c*u2.
struct LvParams {
  double a = 1.5;  // prey growth
  double b = 1.0;  // predation
  double c = 3.0;  // predator death
  double d = 1.0;  // predator reproduction
  std::array<double, 2> u0{1.0, 1.0};
  double t0 = 0.0;
  double t1 = 6.1;
  std::size_t n_points = 61;

  void validate() const;
  /// Uniform grid of n_points on [t0, t1].
  std::vector<double> sample_times() const;
};

struct Trajectory {
  std::vector<double> times;
  Matrix states;  // times.size() x state dimension

  void validate() const;
};

std::array<double, 2> lv_rhs(std::span<const double> u, const LvParams& p);
VectorField lv_field(const LvParams& p);

/// One classical RK4 step of size h.
State rk4_step(const VectorField& f, double t, std::span<const double> u, double h);

/// RK4 with `substeps` uniform steps between consecutive sample times; the
/// first row is u0. Throws IntegrationError on non-finite states or when any
/// component exceeds `blowup` in magnitude.
Trajectory integrate(const VectorField& f, std::span<const double> u0,
                     std::span<const double> times, std::size_t substeps,
                     double blowup = std::numeric_limits<double>::infinity());

struct LvDataset {
  Trajectory clean;
  Trajectory noisy;
  std::array<double, 2> sigma{};  // per-channel noise standard deviation
};

/// Integrates the ground truth on the sample grid and adds N(0, sigma_j^2)
/// to channel j, with sigma_j = noise_fraction * mean(clean channel j).
LvDataset generate_training_data(const LvParams& p, double noise_fraction, std::uint64_t seed,
                                 std::size_t substeps = 10);

/// Magnitude at which a NeuralODE state counts as diverged.
inline constexpr double kDivergenceThreshold = 1e6;

VectorField mlp_field(const Mlp& model);

/// Integrates the model as an autonomous vector field.
Trajectory node_forward(const Mlp& model, std::span<const double> u0,
                        std::span<const double> times, std::size_t substeps);

struct NodeProblem {
  Trajectory target;  // observed (noisy) states at the sample times
  State u0;           // initial condition the model is integrated from
  std::size_t substeps = 10;
  bool include_initial = true;  // score the t0 row as well
};

struct NodeLossResult {
  double loss = 0.0;
  MlpGradients grads;
  Trajectory prediction;
};

/// MSE between the integrated model and the target, with exact reverse-mode
/// gradients through every RK4 stage of the unrolled solver.
NodeLossResult node_loss_and_grad(const Mlp& model, const NodeProblem& problem);

struct NodeTrainConfig {
  std::size_t epochs = 4000;
  double learning_rate = 0.02;
  std::vector<std::uint64_t> seeds{10, 20, 30};
  double noise_fraction = 0.05;
  std::vector<std::size_t> hidden_dims{16, 16};
  std::size_t rk4_substeps = 10;
  bool include_initial = true;
  std::size_t jobs = 1;  // seeds trained concurrently

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> records;
  bool diverged = false;
  std::string diverge_reason;
  Mlp model;  // parameters after the last completed step
};

/// One independent training run per seed: fresh noisy data, init_mlp with
/// [2, hidden..., 2], then full-batch Adam for cfg.epochs steps. The loss is
/// recorded before each step. Runs are returned in seed order.
std::vector<SeedRun> train_node(const ActivationSpec& activation, const NodeTrainConfig& cfg,
                                const LvParams& p);

SeedRun train_node_seed(const ActivationSpec& activation, const NodeTrainConfig& cfg,
                        const LvParams& p, std::uint64_t seed);

struct Extrapolation {
  Trajectory prediction;
  Trajectory truth;
  double mse = 0.0;  // against the clean ground truth on the extended grid
};

/// Continues the training grid spacing until the grid reaches or passes t_end
/// and integrates both the model and the true system on it.
Extrapolation extrapolate(const Mlp& model, const LvParams& p, double t_end,
                          std::size_t substeps);

struct RunSummary {
  std::vector<double> min_losses;  // sorted ascending
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n); 0 when n == 1
  bool single_run = false;
  std::size_t diverged_runs = 0;
};

RunSummary aggregate_min_losses(std::vector<double> min_losses, std::size_t diverged_runs = 0);
RunSummary aggregate_runs(std::span<const SeedRun> runs);

}  // namespace molu::node
