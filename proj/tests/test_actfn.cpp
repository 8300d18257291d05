#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "molu/actfn.hpp"
#include "molu/bench/reference_values.hpp"
#include "molu/prng.hpp"

using namespace molu;

namespace {

double rel_err(double got, double want) {
  const double scale = std::max(std::abs(got), std::abs(want));
  return scale == 0.0 ? 0.0 : std::abs(got - want) / scale;
}

double central_difference(const ActivationSpec& s, double x, double h) {
  return (activation_value(s, x + h) - activation_value(s, x - h)) / (2.0 * h);
}

// Straight from the definition, with no saturation switch.
long double molu_reference(long double x, long double a, long double b) {
  return x * std::tanh(a * std::exp(b * x));
}

}  // namespace

TEST_CASE("molu matches published values") {
  CHECK(rel_err(molu::molu(-1.0, 2.0, 2.0), -2.64248689e-01) < 1e-6);
  CHECK(rel_err(molu::molu(-2.0, 2.0, 2.0), -7.32298040e-02) < 1e-6);
  CHECK(rel_err(molu::molu(3.0, 2.0, 2.0), 3.00000000) < 1e-6);
  CHECK(molu::molu(0.0, 2.0, 2.0) == 0.0);
}

TEST_CASE("molu agrees with an extended-precision evaluation") {
  for (double x = -12.0; x <= 12.0; x += 0.37) {
    for (double a : {0.5, 1.0, 2.0, 5.0})
      for (double b : {0.5, 2.0, 3.0}) {
        const double want = static_cast<double>(molu_reference(x, a, b));
        CHECK(std::abs(molu::molu(x, a, b) - want) <= 1e-15 * std::max(1.0, std::abs(want)));
      }
  }
}

TEST_CASE("molu_prime examples") {
  CHECK(molu_prime(0.0, 2.0, 2.0) == doctest::Approx(0.9640275800).epsilon(1e-10));
  CHECK(molu_prime(0.0, 2.0, 2.0) == doctest::Approx(std::tanh(2.0)).epsilon(1e-15));
  const auto m = ActivationSpec::molu();
  CHECK(rel_err(central_difference(m, 0.0, 1e-6), std::tanh(2.0)) < 1e-8);

  CHECK(molu_prime(5.0, 2.0, 2.0) == 1.0);
  CHECK(std::abs(central_difference(m, 5.0, 1e-6) - 1.0) < 1e-9);

  CHECK(rel_err(molu_prime(-3.0, 2.0, 2.0), central_difference(m, -3.0, 1e-6)) < 1e-6);
}

TEST_CASE("baseline activations match published values") {
  CHECK(rel_err(activation_value(ActivationSpec::of(ActivationKind::GeLU), -1.0),
                -1.58808009e-01) < 1e-6);
  CHECK(rel_err(activation_value(ActivationSpec::of(ActivationKind::Mish), -1.0),
                -3.03401461e-01) < 1e-6);
  CHECK(rel_err(activation_value(ActivationSpec::elu(1.0), -7.0), -9.99088118e-01) < 1e-6);
  CHECK(rel_err(activation_value(ActivationSpec::of(ActivationKind::SiLU), -1.0),
                -2.68941421e-01) < 1e-6);
  CHECK(activation_value(ActivationSpec::of(ActivationKind::ReLU), -3.0) == 0.0);
}

TEST_CASE("GeLU column fits the tanh approximation, not the erf form") {
  const double erf_form = 0.5 * -1.0 * (1.0 + std::erf(-1.0 / std::sqrt(2.0)));
  CHECK(rel_err(erf_form, -1.58808009e-01) > 1e-4);
  CHECK(rel_err(activation_value(ActivationSpec::of(ActivationKind::GeLU), -1.0),
                -1.58808009e-01) < 1e-6);
}

TEST_CASE("derivative examples") {
  CHECK(activation_derivative(ActivationSpec::of(ActivationKind::ReLU), 2.0) == 1.0);
  CHECK(activation_derivative(ActivationSpec::of(ActivationKind::SiLU), 0.0) == 0.5);
  CHECK(rel_err(central_difference(ActivationSpec::of(ActivationKind::SiLU), 0.0, 1e-6), 0.5) <
        1e-9);
  CHECK(activation_derivative(ActivationSpec::of(ActivationKind::Tanh), 0.0) == 1.0);
  // right derivative at the kink
  CHECK(activation_derivative(ActivationSpec::of(ActivationKind::ReLU), 0.0) == 1.0);
  CHECK(activation_derivative(ActivationSpec::leaky_relu(), 0.0) == 1.0);
  CHECK(activation_derivative(ActivationSpec::leaky_relu(0.2), -1.0) == 0.2);
}

TEST_CASE("comparison table reproduces every published cell") {
  using bench::kTable1;
  std::vector<double> inputs;
  for (int x = -7; x <= 8; ++x) inputs.push_back(x);
  const std::vector<ActivationSpec> specs{
      ActivationSpec::of(ActivationKind::GeLU), ActivationSpec::of(ActivationKind::SiLU),
      ActivationSpec::of(ActivationKind::Mish), ActivationSpec::elu(1.0), ActivationSpec::molu()};
  const auto table = comparison_table(inputs, specs);
  REQUIRE(table.size() == 16);
  for (std::size_t r = 0; r < 16; ++r) {
    REQUIRE(table[r].size() == 5);
    for (std::size_t c = 0; c < 5; ++c) {
      INFO("x=" << inputs[r] << " column " << c);
      CHECK(rel_err(table[r][c], kTable1[r][c]) <= 1e-6);
    }
  }
  // cells typed in again from the table, independent of the header
  CHECK(rel_err(table[0][0], -2.33146835e-15) <= 1e-6);
  CHECK(rel_err(table[4][2], -1.45647461e-01) <= 1e-6);
  CHECK(rel_err(table[0][4], -1.16414021e-05) <= 1e-6);
  CHECK(rel_err(table[15][1], 7.99731720) <= 1e-6);
}

TEST_CASE("comparison table edge rows") {
  std::vector<ActivationSpec> all;
  for (ActivationKind k : kAllActivationKinds) all.push_back(ActivationSpec::of(k));
  const std::vector<double> zero{0.0};
  const auto zero_row = comparison_table(zero, all);
  for (double v : zero_row[0]) CHECK(v == 0.0);

  const std::vector<double> big{6.0, 7.0, 8.0};
  const std::vector<ActivationSpec> lin{ActivationSpec::molu(), ActivationSpec::elu(1.0),
                                        ActivationSpec::of(ActivationKind::GeLU)};
  const auto t = comparison_table(big, lin);
  for (std::size_t r = 0; r < 3; ++r)
    for (double v : t[r]) CHECK(std::abs(v - big[r]) <= 1e-6);
}

TEST_CASE("every kind vanishes at zero") {
  for (ActivationKind k : kAllActivationKinds)
    CHECK(activation_value(ActivationSpec::of(k), 0.0) == 0.0);
}

TEST_CASE("molu is the identity on [1, 100]") {
  for (double x = 1.0; x <= 100.0; x += 0.01) CHECK(std::abs(molu::molu(x, 2.0, 2.0) - x) <= 1e-9);
}

TEST_CASE("molu decays at least as fast as x*alpha*e^(beta x)") {
  // a few ulps of slack: far out tanh(u) rounds to u itself
  const double slack = 1.0 + 4 * std::numeric_limits<double>::epsilon();
  for (double x = -1.0; x >= -40.0; x -= 0.05)
    CHECK(std::abs(molu::molu(x, 2.0, 2.0)) <= slack * std::abs(x) * 2.0 * std::exp(2.0 * x));
}

TEST_CASE("analytic derivatives agree with central differences") {
  data::SeededPrng prng(1234, 7);
  std::vector<ActivationSpec> specs;
  for (ActivationKind k : kAllActivationKinds) specs.push_back(ActivationSpec::of(k));
  specs.push_back(ActivationSpec::molu(1.0, 3.0));
  specs.push_back(ActivationSpec::elu(0.5));
  for (const auto& s : specs) {
    const bool kink = s.kind == ActivationKind::ReLU || s.kind == ActivationKind::LeakyReLU;
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
      const double x = prng.uniform(-10.0, 10.0);
      if (kink && std::abs(x) < 1e-6) continue;
      const double a = activation_derivative(s, x);
      const double n = central_difference(s, x, 1e-5);
      if (std::abs(a - n) > 1e-8 && rel_err(a, n) > 1e-5) ++failures;
    }
    INFO(activation_label(s));
    CHECK(failures == 0);
  }
}

TEST_CASE("saturation switch is continuous") {
  for (double a : {2.0, 0.5, 7.0})
    for (double b : {2.0, 1.0, 0.3}) {
      const double x_sat = std::log(kMoluSaturation / a) / b;
      const double lo = std::nextafter(x_sat, -1e9), hi = std::nextafter(x_sat, 1e9);
      CHECK(std::abs(molu::molu(hi, a, b) - molu::molu(lo, a, b)) <= 1e-12 * std::max(1.0, x_sat));
      CHECK(std::abs(molu_prime(hi, a, b) - molu_prime(lo, a, b)) <= 1e-12);
    }
}

TEST_CASE("molu stays finite far into either tail") {
  for (double x : {-700.0, -1e6, 700.0, 1e6, 1e300}) {
    CHECK(std::isfinite(molu::molu(x, 2.0, 2.0)));
    CHECK(std::isfinite(molu_prime(x, 2.0, 2.0)));
  }
}

TEST_CASE("Mish approaches x*tanh(e^x) for very negative x") {
  const auto mish = ActivationSpec::of(ActivationKind::Mish);
  for (double x = -5.0; x >= -30.0; x -= 0.1)
    CHECK(std::abs(activation_value(mish, x) - molu::molu(x, 1.0, 1.0)) <= std::abs(x) * std::exp(2 * x));
  const double gap = std::abs(activation_value(mish, -5.0) - molu::molu(-5.0, 1.0, 1.0));
  CHECK(gap == doctest::Approx(1.1e-4).epsilon(0.05));
}

TEST_CASE("parameters a kind does not read are ignored") {
  ActivationSpec m = ActivationSpec::molu();
  m.leaky_slope = 123.0;
  CHECK(activation_value(m, -1.0) == molu::molu(-1.0, 2.0, 2.0));
  ActivationSpec e = ActivationSpec::elu(1.0);
  e.beta = -5.0;
  CHECK(activation_value(e, -1.0) == std::expm1(-1.0));
  ActivationSpec t = ActivationSpec::of(ActivationKind::Tanh);
  t.alpha = -1.0;
  CHECK_NOTHROW(t.validate());
  CHECK(activation_value(t, 0.5) == std::tanh(0.5));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(molu::molu(NAN, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(molu::molu(INFINITY, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(molu::molu(1.0, 0.0, 2.0), DomainError);
  CHECK_THROWS_AS(molu::molu(1.0, 2.0, -1.0), DomainError);
  CHECK_THROWS_AS(molu_prime(1.0, -2.0, 2.0), DomainError);
  CHECK_THROWS_AS(activation_value(ActivationSpec::of(ActivationKind::Tanh), NAN), DomainError);
  CHECK_THROWS_AS(activation_value(ActivationSpec::elu(0.0), -1.0), DomainError);
  CHECK_THROWS_AS(ActivationSpec::molu(2.0, 0.0).validate(), DomainError);
}

TEST_CASE("names and labels") {
  CHECK(parse_activation_kind("molu") == ActivationKind::MoLU);
  CHECK(parse_activation_kind("Swish") == ActivationKind::SiLU);
  CHECK(parse_activation_kind("leaky_relu") == ActivationKind::LeakyReLU);
  CHECK(parse_activation_kind("LEAKYRELU") == ActivationKind::LeakyReLU);
  CHECK_THROWS_AS(parse_activation_kind("sigmoid"), std::invalid_argument);
  for (ActivationKind k : kAllActivationKinds)
    CHECK(parse_activation_kind(activation_name(k)) == k);
  CHECK(activation_label(ActivationSpec::molu()) == "MoLU");
  CHECK(activation_label(ActivationSpec::molu(1.0, 3.0)) == "MoLU(a=1;b=3)");
  CHECK(activation_label(ActivationSpec::elu(1.0)) == "ELU");
  CHECK(activation_label(ActivationSpec::leaky_relu(0.2)) == "LeakyReLU(slope=0.2)");
}
