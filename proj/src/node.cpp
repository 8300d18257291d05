#include "molu/node.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "molu/loss.hpp"
#include "molu/optim.hpp"
#include "molu/prng.hpp"

namespace molu::node {
namespace {

void require_healthy(std::span<const double> u, double t, double blowup) {
  for (double v : u) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite state at t=" << t;
      throw IntegrationError(os.str(), t);
    }
    if (std::abs(v) > blowup) {
      std::ostringstream os;
      os << "state magnitude " << std::abs(v) << " exceeds " << blowup << " at t=" << t;
      throw IntegrationError(os.str(), t);
    }
  }
}

// RK4 stage combinations, shared by the plain integrator and the unrolled
// training path so both produce identical trajectories.
void axpy_into(std::span<double> out, std::span<const double> u, double s,
               std::span<const double> k) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u[i] + s * k[i];
}

void rk4_combine(std::span<double> out, std::span<const double> u, double h,
                 std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) {
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = u[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

Trajectory make_grid(const LvParams& p, double t_end) {
  const double dt = (p.t1 - p.t0) / static_cast<double>(p.n_points - 1);
  const auto count = static_cast<std::size_t>(std::llround((t_end - p.t0) / dt)) + 1;
  // The training grid itself is reused verbatim so t_end == t1 reproduces it.
  Trajectory tr;
  tr.times = p.sample_times();
  for (std::size_t i = tr.times.size(); i < count; ++i)
    tr.times.push_back(p.t0 + dt * static_cast<double>(i));
  return tr;
}

}  // namespace

void LvParams::validate() const {
  if (!(a > 0 && b > 0 && c > 0 && d > 0))
    throw std::invalid_argument("Lotka-Volterra coefficients must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("time span needs t1 > t0");
  if (n_points < 2) throw std::invalid_argument("need at least two sample times");
}

std::vector<double> LvParams::sample_times() const {
  validate();
  std::vector<double> t(n_points);
  const double span = t1 - t0;
  for (std::size_t i = 0; i < n_points; ++i)
    t[i] = t0 + span * static_cast<double>(i) / static_cast<double>(n_points - 1);
  return t;
}

void Trajectory::validate() const {
  if (times.empty()) throw std::invalid_argument("trajectory has no samples");
  if (states.rows() != times.size())
    throw ShapeError("trajectory rows do not match the number of times");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("trajectory times must be strictly increasing");
}

std::array<double, 2> lv_rhs(std::span<const double> u, const LvParams& p) {
  return {p.a * u[0] - p.b * u[0] * u[1], p.d * u[0] * u[1] - p.c * u[1]};
}

VectorField lv_field(const LvParams& p) {
  return [p](double, std::span<const double> u, std::span<double> du) {
    const auto r = lv_rhs(u, p);
    du[0] = r[0];
    du[1] = r[1];
  };
}

State rk4_step(const VectorField& f, double t, std::span<const double> u, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("rk4_step: step must be positive");
  const std::size_t n = u.size();
  State k1(n), k2(n), k3(n), k4(n), z(n), out(n);
  f(t, u, k1);
  axpy_into(z, u, h / 2.0, k1);
  require_healthy(z, t, std::numeric_limits<double>::infinity());
  f(t + h / 2.0, z, k2);
  axpy_into(z, u, h / 2.0, k2);
  require_healthy(z, t, std::numeric_limits<double>::infinity());
  f(t + h / 2.0, z, k3);
  axpy_into(z, u, h, k3);
  require_healthy(z, t, std::numeric_limits<double>::infinity());
  f(t + h, z, k4);
  rk4_combine(out, u, h, k1, k2, k3, k4);
  require_healthy(out, t + h, std::numeric_limits<double>::infinity());
  return out;
}

Trajectory integrate(const VectorField& f, std::span<const double> u0,
                     std::span<const double> times, std::size_t substeps, double blowup) {
  if (times.empty()) throw std::invalid_argument("integrate: no sample times");
  if (substeps == 0) throw std::invalid_argument("integrate: substeps must be >= 1");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("integrate: times must be strictly increasing");

  Trajectory tr;
  tr.times.assign(times.begin(), times.end());
  tr.states = Matrix(times.size(), u0.size());
  State u(u0.begin(), u0.end());
  require_healthy(u, times[0], blowup);
  std::copy(u.begin(), u.end(), tr.states.row_span(0).begin());
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = (times[i] - times[i - 1]) / static_cast<double>(substeps);
    for (std::size_t s = 0; s < substeps; ++s) {
      const double t = times[i - 1] + h * static_cast<double>(s);
      u = rk4_step(f, t, u, h);
      require_healthy(u, t + h, blowup);
    }
    std::copy(u.begin(), u.end(), tr.states.row_span(i).begin());
  }
  return tr;
}

LvDataset generate_training_data(const LvParams& p, double noise_fraction, std::uint64_t seed,
                                 std::size_t substeps) {
  if (!(noise_fraction >= 0.0)) throw std::invalid_argument("noise_fraction must be >= 0");
  const std::vector<double> times = p.sample_times();
  LvDataset ds;
  ds.clean = integrate(lv_field(p), p.u0, times, substeps);
  ds.noisy = ds.clean;

  const Matrix& x = ds.clean.states;
  for (std::size_t j = 0; j < 2; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) sum += x(i, j);
    ds.sigma[j] = noise_fraction * sum / static_cast<double>(x.rows());
  }
  data::SeededPrng prng(seed, data::streams::kNoise);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < 2; ++j)
      ds.noisy.states(i, j) = x(i, j) + data::gaussian(prng, 0.0, ds.sigma[j]);
  return ds;
}

VectorField mlp_field(const Mlp& model) {
  if (model.in_dim() != model.out_dim())
    throw ShapeError("mlp_field: model must map R^n to R^n");
  return [&model](double, std::span<const double> u, std::span<double> du) {
    const Matrix y = model.forward(Matrix::row(u));
    std::copy(y.data().begin(), y.data().end(), du.begin());
  };
}

Trajectory node_forward(const Mlp& model, std::span<const double> u0,
                        std::span<const double> times, std::size_t substeps) {
  if (u0.size() != model.in_dim()) throw ShapeError("node_forward: u0 does not match model");
  return integrate(mlp_field(model), u0, times, substeps, kDivergenceThreshold);
}

NodeLossResult node_loss_and_grad(const Mlp& model, const NodeProblem& problem) {
  const Trajectory& target = problem.target;
  target.validate();
  const std::size_t dim = problem.u0.size();
  if (dim != model.in_dim() || dim != model.out_dim() || target.states.cols() != dim)
    throw ShapeError("node_loss_and_grad: model, u0 and target dimensions disagree");
  if (problem.substeps == 0) throw std::invalid_argument("substeps must be >= 1");

  const std::size_t n_times = target.times.size();
  const std::size_t n_steps = (n_times - 1) * problem.substeps;

  // Forward pass; keep every stage cache for the reverse sweep.
  struct StepTape {
    MlpCache stage[4];
    double h = 0.0;
  };
  std::vector<StepTape> tape(n_steps);
  NodeLossResult out;
  out.prediction.times = target.times;
  out.prediction.states = Matrix(n_times, dim);

  Matrix u = Matrix::row(problem.u0);
  require_healthy(u.data(), target.times[0], kDivergenceThreshold);
  std::copy(u.data().begin(), u.data().end(), out.prediction.states.row_span(0).begin());
  Matrix z(1, dim), next(1, dim);
  std::size_t step = 0;
  for (std::size_t i = 1; i < n_times; ++i) {
    const double h = (target.times[i] - target.times[i - 1]) / static_cast<double>(problem.substeps);
    for (std::size_t s = 0; s < problem.substeps; ++s, ++step) {
      const double t = target.times[i - 1] + h * static_cast<double>(s);
      StepTape& tp = tape[step];
      tp.h = h;
      const Matrix k1 = model.forward(u, tp.stage[0]);
      axpy_into(z.data(), u.data(), h / 2.0, k1.data());
      const Matrix k2 = model.forward(z, tp.stage[1]);
      axpy_into(z.data(), u.data(), h / 2.0, k2.data());
      const Matrix k3 = model.forward(z, tp.stage[2]);
      axpy_into(z.data(), u.data(), h, k3.data());
      const Matrix k4 = model.forward(z, tp.stage[3]);
      rk4_combine(next.data(), u.data(), h, k1.data(), k2.data(), k3.data(), k4.data());
      require_healthy(next.data(), t + h, kDivergenceThreshold);
      std::swap(u, next);
    }
    std::copy(u.data().begin(), u.data().end(), out.prediction.states.row_span(i).begin());
  }

  // Loss over the scored rows.
  const std::size_t first_row = problem.include_initial ? 0 : 1;
  if (first_row >= n_times) throw std::invalid_argument("no rows left to score");
  const std::size_t scored = n_times - first_row;
  Matrix dpred(n_times, dim);
  {
    Matrix p(scored, dim), y(scored, dim);
    for (std::size_t r = 0; r < scored; ++r)
      for (std::size_t j = 0; j < dim; ++j) {
        p(r, j) = out.prediction.states(first_row + r, j);
        y(r, j) = target.states(first_row + r, j);
      }
    LossResult l = mse_loss(p, y);
    out.loss = l.loss;
    for (std::size_t r = 0; r < scored; ++r)
      for (std::size_t j = 0; j < dim; ++j) dpred(first_row + r, j) = l.grad(r, j);
  }

  // Reverse sweep: `adj` is dL/du at the current step boundary.
  out.grads = MlpGradients(model);
  Matrix adj(1, dim);
  step = n_steps;
  for (std::size_t i = n_times - 1; i >= 1; --i) {
    for (std::size_t j = 0; j < dim; ++j) adj(0, j) += dpred(i, j);
    for (std::size_t s = 0; s < problem.substeps; ++s) {
      const StepTape& tp = tape[--step];
      const double h = tp.h;
      Matrix k1bar(1, dim), k2bar(1, dim), k3bar(1, dim), k4bar(1, dim);
      for (std::size_t j = 0; j < dim; ++j) {
        k1bar(0, j) = h / 6.0 * adj(0, j);
        k2bar(0, j) = h / 3.0 * adj(0, j);
        k3bar(0, j) = h / 3.0 * adj(0, j);
        k4bar(0, j) = h / 6.0 * adj(0, j);
      }
      // z4 = u + h k3
      const Matrix z4bar = model.backward(tp.stage[3], k4bar, out.grads);
      for (std::size_t j = 0; j < dim; ++j) {
        adj(0, j) += z4bar(0, j);
        k3bar(0, j) += h * z4bar(0, j);
      }
      // z3 = u + h/2 k2
      const Matrix z3bar = model.backward(tp.stage[2], k3bar, out.grads);
      for (std::size_t j = 0; j < dim; ++j) {
        adj(0, j) += z3bar(0, j);
        k2bar(0, j) += h / 2.0 * z3bar(0, j);
      }
      // z2 = u + h/2 k1
      const Matrix z2bar = model.backward(tp.stage[1], k2bar, out.grads);
      for (std::size_t j = 0; j < dim; ++j) {
        adj(0, j) += z2bar(0, j);
        k1bar(0, j) += h / 2.0 * z2bar(0, j);
      }
      const Matrix z1bar = model.backward(tp.stage[0], k1bar, out.grads);
      for (std::size_t j = 0; j < dim; ++j) adj(0, j) += z1bar(0, j);
    }
  }
  if (!out.grads.all_finite())
    throw IntegrationError("non-finite gradient in reverse sweep", target.times.back());
  return out;
}

void NodeTrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(noise_fraction >= 0.0)) throw std::invalid_argument("noise fraction must be >= 0");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (rk4_substeps < 1) throw std::invalid_argument("rk4 substeps must be >= 1");
  for (std::size_t h : hidden_dims)
    if (h == 0) throw std::invalid_argument("hidden widths must be positive");
}

SeedRun train_node_seed(const ActivationSpec& activation, const NodeTrainConfig& cfg,
                        const LvParams& p, std::uint64_t seed) {
  const LvDataset ds = generate_training_data(p, cfg.noise_fraction, seed);

  std::vector<std::size_t> dims{2};
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(2);

  SeedRun run;
  run.seed = seed;
  run.model = init_mlp(dims, activation, seed);
  NodeProblem problem{ds.noisy, State(p.u0.begin(), p.u0.end()), cfg.rk4_substeps,
                      cfg.include_initial};
  OptimizerState opt = OptimizerState::adam(cfg.learning_rate);
  run.records.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    NodeLossResult r;
    try {
      r = node_loss_and_grad(run.model, problem);
    } catch (const IntegrationError& e) {
      run.diverged = true;
      std::ostringstream os;
      os << "epoch " << epoch << ": " << e.what();
      run.diverge_reason = os.str();
      break;
    }
    run.records.push_back({epoch, r.loss});
    optimizer_step(run.model, r.grads, opt);
  }
  return run;
}

std::vector<SeedRun> train_node(const ActivationSpec& activation, const NodeTrainConfig& cfg,
                                const LvParams& p) {
  cfg.validate();
  p.validate();
  activation.validate();
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<SeedRun> runs(seeds.size());

  const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, seeds.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      runs[i] = train_node_seed(activation, cfg, p, seeds[i]);
    return runs;
  }
  // Static round-robin partition; each run owns its data, model and PRNG.
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < seeds.size(); i += jobs)
          runs[i] = train_node_seed(activation, cfg, p, seeds[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return runs;
}

Extrapolation extrapolate(const Mlp& model, const LvParams& p, double t_end,
                          std::size_t substeps) {
  p.validate();
  if (t_end < p.t1) throw std::invalid_argument("extrapolation end precedes the training span");
  const Trajectory grid = make_grid(p, t_end);
  Extrapolation ex;
  ex.prediction = node_forward(model, p.u0, grid.times, substeps);
  ex.truth = integrate(lv_field(p), p.u0, grid.times, substeps);
  ex.mse = mse_loss(ex.prediction.states, ex.truth.states).loss;
  return ex;
}

RunSummary aggregate_min_losses(std::vector<double> min_losses, std::size_t diverged_runs) {
  if (min_losses.empty()) throw std::invalid_argument("aggregate: no runs");
  std::sort(min_losses.begin(), min_losses.end());
  RunSummary s;
  const double n = static_cast<double>(min_losses.size());
  s.mean = std::accumulate(min_losses.begin(), min_losses.end(), 0.0) / n;
  if (min_losses.size() == 1) {
    s.single_run = true;
  } else {
    double ss = 0.0;
    for (double v : min_losses) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  s.min_losses = std::move(min_losses);
  s.diverged_runs = diverged_runs;
  return s;
}

RunSummary aggregate_runs(std::span<const SeedRun> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate_runs: no runs");
  std::vector<double> mins;
  std::size_t diverged = 0;
  for (const SeedRun& r : runs) {
    if (r.diverged) ++diverged;
    double m = std::numeric_limits<double>::infinity();
    for (const EpochRecord& e : r.records)
      if (std::isfinite(e.train_loss)) m = std::min(m, e.train_loss);
    if (!std::isfinite(m))
      throw std::invalid_argument("aggregate_runs: seed " + std::to_string(r.seed) +
                                  " has no finite loss");
    mins.push_back(m);
  }
  return aggregate_min_losses(std::move(mins), diverged);
}

}  // namespace molu::node
