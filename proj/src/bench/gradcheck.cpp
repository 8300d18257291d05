#include "molu/bench/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "molu/loss.hpp"
#include "molu/nn.hpp"
#include "molu/node.hpp"
#include "molu/prng.hpp"

namespace molu::bench {
namespace {

constexpr double kKinkExclusion = 1e-6;

bool has_kink(ActivationKind k) {
  return k == ActivationKind::ReLU || k == ActivationKind::LeakyReLU;
}

void record(CheckResult& r, double analytic, double numeric, double at, double rel_tol,
            double abs_tol) {
  ++r.points;
  const double abs_err = std::abs(analytic - numeric);
  r.worst_abs = std::max(r.worst_abs, abs_err);
  if (abs_err <= abs_tol) return;
  const double rel = relative_error(analytic, numeric);
  if (rel > r.worst_rel) {
    r.worst_rel = rel;
    r.worst_at = at;
  }
  if (rel > rel_tol) ++r.failures;
}

// Central differences of `loss` over every parameter of `model`.
template <class LossFn>
CheckResult check_parameters(Mlp model, const MlpGradients& analytic, LossFn loss, double step,
                             double rel_tol, double abs_tol) {
  CheckResult r;
  auto params = model.parameter_views();
  auto grads = analytic.views();
  std::size_t flat = 0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i, ++flat) {
      const double saved = params[b][i];
      params[b][i] = saved + step;
      const double up = loss(model);
      params[b][i] = saved - step;
      const double down = loss(model);
      params[b][i] = saved;
      record(r, grads[b][i], (up - down) / (2.0 * step), static_cast<double>(flat), rel_tol,
             abs_tol);
    }
  }
  return r;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return scale == 0.0 ? 0.0 : std::abs(analytic - numeric) / scale;
}

CheckResult check_scalar_kernel(const ActivationSpec& spec, const GradcheckOptions& opt) {
  data::SeededPrng prng(opt.seed, static_cast<std::uint64_t>(spec.kind) + 100);
  std::vector<double> xs{0.0};
  while (xs.size() < opt.samples + 1) xs.push_back(prng.uniform(-10.0, 10.0));

  CheckResult r;
  for (double x : xs) {
    if (opt.exclude_kinks && has_kink(spec.kind) && std::abs(x) < kKinkExclusion) continue;
    const double numeric = (activation_value(spec, x + opt.step) -
                            activation_value(spec, x - opt.step)) /
                           (2.0 * opt.step);
    record(r, activation_derivative(spec, x), numeric, x, opt.tolerance, opt.abs_tolerance);
  }
  return r;
}

CheckResult check_mlp(const ActivationSpec& spec, const GradcheckOptions& opt) {
  const std::size_t dims[] = {4, 8, 3};
  const Mlp model = init_mlp(dims, spec, opt.seed + 1);
  data::SeededPrng prng(opt.seed, 200);
  Matrix x(5, 4), target(5, 3);
  for (double& v : x.data()) v = prng.uniform(-2.0, 2.0);
  for (double& v : target.data()) v = prng.uniform(-1.0, 1.0);

  auto loss = [&](const Mlp& m) { return mse_loss(m.forward(x), target).loss; };
  MlpCache cache;
  const LossResult l = mse_loss(model.forward(x, cache), target);
  MlpGradients grads(model);
  model.backward(cache, l.grad, grads);
  return check_parameters(model, grads, loss, opt.step, opt.tolerance, opt.abs_tolerance);
}

CheckResult check_node(const ActivationSpec& spec, const GradcheckOptions& opt) {
  node::LvParams lv;
  lv.t1 = 1.0;
  lv.n_points = 5;
  const node::LvDataset ds = node::generate_training_data(lv, 0.05, opt.seed);
  const std::size_t dims[] = {2, 8, 2};
  const Mlp model = init_mlp(dims, spec, opt.seed + 2);
  const node::NodeProblem problem{ds.noisy, {lv.u0[0], lv.u0[1]}, 4, true};

  auto loss = [&](const Mlp& m) { return node::node_loss_and_grad(m, problem).loss; };
  const node::NodeLossResult res = node::node_loss_and_grad(model, problem);
  return check_parameters(model, res.grads, loss, opt.step, opt.node_tolerance,
                          opt.abs_tolerance);
}

std::vector<GradcheckLine> run_gradcheck(const GradcheckOptions& opt) {
  std::vector<ActivationSpec> specs = opt.activations;
  if (specs.empty())
    for (ActivationKind k : kAllActivationKinds) specs.push_back(ActivationSpec::of(k));

  std::vector<GradcheckLine> lines;
  for (const ActivationSpec& s : specs) {
    GradcheckLine line;
    line.activation = s;
    line.scalar = check_scalar_kernel(s, opt);
    if (opt.network) line.network = check_mlp(s, opt);
    if (opt.node) line.node = check_node(s, opt);
    lines.push_back(line);
  }
  return lines;
}

}  // namespace molu::bench
