#include <doctest.h>

#include <cmath>
#include <vector>

#include "molu/nn.hpp"
#include "molu/optim.hpp"
#include "molu/prng.hpp"

using namespace molu;

namespace {

struct Buffers {
  std::vector<double> p, g;
  ParamViews params() { return {std::span<double>(p)}; }
  GradViews grads() const { return {std::span<const double>(g)}; }
};

}  // namespace

TEST_CASE("SGD: zero gradient leaves parameters alone") {
  Buffers b{{1.0, -2.0}, {0.0, 0.0}};
  auto s = OptimizerState::sgd(0.1, 0.5);
  sgd_momentum_step(b.params(), b.grads(), s);
  CHECK(b.p == std::vector<double>{1.0, -2.0});
  CHECK(s.step_count == 1);
}

TEST_CASE("SGD without momentum is plain gradient descent") {
  Buffers b{{1.0, -2.0}, {0.5, -4.0}};
  auto s = OptimizerState::sgd(0.1, 0.0);
  sgd_momentum_step(b.params(), b.grads(), s);
  CHECK(b.p[0] == doctest::Approx(1.0 - 0.05));
  CHECK(b.p[1] == doctest::Approx(-2.0 + 0.4));
}

TEST_CASE("SGD momentum: two steps of constant g move by lr*g*2.5") {
  Buffers b{{3.0}, {2.0}};
  auto s = OptimizerState::sgd(0.01, 0.5);
  sgd_momentum_step(b.params(), b.grads(), s);
  sgd_momentum_step(b.params(), b.grads(), s);
  CHECK(b.p[0] == doctest::Approx(3.0 - 0.01 * 2.0 * 2.5).epsilon(1e-14));
  CHECK(s.step_count == 2);
}

TEST_CASE("Adam: zero gradient from a fresh state changes nothing") {
  Buffers b{{0.3, -0.7}, {0.0, 0.0}};
  auto s = OptimizerState::adam(0.02);
  adam_step(b.params(), b.grads(), s);
  CHECK(b.p == std::vector<double>{0.3, -0.7});
}

TEST_CASE("Adam: first step is -lr*sign(g)") {
  Buffers b{{0.0, 0.0, 0.0}, {3.0, -1e-3, 250.0}};
  auto s = OptimizerState::adam(0.02);
  adam_step(b.params(), b.grads(), s);
  CHECK(b.p[0] == doctest::Approx(-0.02).epsilon(1e-6));
  CHECK(b.p[1] == doctest::Approx(0.02).epsilon(1e-4));
  CHECK(b.p[2] == doctest::Approx(-0.02).epsilon(1e-6));
}

TEST_CASE("Adam matches a hand-rolled reference over 10 steps") {
  data::SeededPrng prng(5);
  Buffers b{std::vector<double>(7), std::vector<double>(7)};
  for (double& v : b.p) v = prng.uniform(-1, 1);
  std::vector<double> ref = b.p, m(7, 0.0), v(7, 0.0);
  const double lr = 0.02, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  auto s = OptimizerState::adam(lr, b1, b2, eps);
  for (int t = 1; t <= 10; ++t) {
    for (double& g : b.g) g = prng.uniform(-2, 2);
    adam_step(b.params(), b.grads(), s);
    for (std::size_t i = 0; i < 7; ++i) {
      m[i] = b1 * m[i] + (1 - b1) * b.g[i];
      v[i] = b2 * v[i] + (1 - b2) * b.g[i] * b.g[i];
      const double mh = m[i] / (1 - std::pow(b1, t));
      const double vh = v[i] / (1 - std::pow(b2, t));
      ref[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
  for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(b.p[i] - ref[i]) <= 1e-12);
  CHECK(s.step_count == 10);
}

TEST_CASE("buffers follow the parameter shapes") {
  Buffers b{{1.0, 2.0}, {1.0, 1.0}};
  auto s = OptimizerState::adam(0.1);
  adam_step(b.params(), b.grads(), s);
  REQUIRE(s.first.size() == 1);
  CHECK(s.first[0].size() == 2);
  CHECK(s.second[0].size() == 2);

  std::vector<double> other(3, 0.0), og(3, 0.0);
  CHECK_THROWS_AS(adam_step({std::span<double>(other)}, {std::span<const double>(og)}, s),
                  ShapeError);
  std::vector<double> short_g(1, 0.0);
  auto fresh = OptimizerState::sgd(0.1, 0.5);
  CHECK_THROWS_AS(
      sgd_momentum_step(b.params(), {std::span<const double>(short_g)}, fresh), ShapeError);
}

TEST_CASE("invalid hyperparameters") {
  CHECK_THROWS_AS(OptimizerState::sgd(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(OptimizerState::sgd(0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(OptimizerState::adam(-1.0), std::invalid_argument);
}

TEST_CASE("model-level step is deterministic") {
  const std::size_t dims[] = {3, 4, 2};
  auto run = [&] {
    Mlp m = init_mlp(dims, ActivationSpec::molu(), 9);
    MlpGradients g(m);
    for (auto v : g.views())
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * static_cast<double>(i) - 0.2;
    auto s = OptimizerState::adam(0.02);
    for (int i = 0; i < 5; ++i) optimizer_step(m, g, s);
    return m;
  };
  const Mlp a = run(), b = run();
  CHECK(a == b);
  CHECK_FALSE(a == init_mlp(dims, ActivationSpec::molu(), 9));
}
