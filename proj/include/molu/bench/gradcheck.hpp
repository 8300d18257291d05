#pragma once

#include <cstdint>
#include <vector>

#include "molu/actfn.hpp"

namespace molu::bench {

struct GradcheckOptions {
  std::vector<ActivationSpec> activations;  // empty = all eight kinds
  std::size_t samples = 1000;
  double tolerance = 1e-5;       // relative, scalar kernels and MLP
  double node_tolerance = 1e-4;  // relative, NeuralODE parameters
  double abs_tolerance = 1e-8;
  double step = 1e-5;
  bool exclude_kinks = true;  // skip |x| < 1e-6 for ReLU / LeakyReLU
  bool network = true;        // [4,8,3] MLP check
  bool node = true;           // 2->8->2 NeuralODE check over 5 time points
  std::uint64_t seed = 0;
};

/// Worst disagreement among points whose absolute error exceeds the absolute
/// floor; 0 when every point passes on the absolute floor alone.
struct CheckResult {
  double worst_rel = 0.0;
  double worst_at = 0.0;  // input x (scalar) or parameter index (network)
  double worst_abs = 0.0;  // over every point
  std::size_t points = 0;
  std::size_t failures = 0;
  bool pass() const { return failures == 0; }
};

struct GradcheckLine {
  ActivationSpec activation;
  CheckResult scalar;
  CheckResult network;
  CheckResult node;
  bool pass() const { return scalar.pass() && network.pass() && node.pass(); }
};

/// Relative error |a - n| / max(|a|, |n|); 0 when both vanish.
double relative_error(double analytic, double numeric);

CheckResult check_scalar_kernel(const ActivationSpec& spec, const GradcheckOptions& opt);
CheckResult check_mlp(const ActivationSpec& spec, const GradcheckOptions& opt);
CheckResult check_node(const ActivationSpec& spec, const GradcheckOptions& opt);

std::vector<GradcheckLine> run_gradcheck(const GradcheckOptions& opt);

}  // namespace molu::bench
