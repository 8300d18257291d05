#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "molu/loss.hpp"
#include "molu/prng.hpp"

using namespace molu;

TEST_CASE("mse trivial cases") {
  const Matrix a(3, 2, 1.5);
  const LossResult same = mse_loss(a, a);
  CHECK(same.loss == 0.0);
  CHECK(same.grad.max_abs() == 0.0);
  const LossResult off = mse_loss(Matrix(3, 2, 2.5), a);
  CHECK(off.loss == 1.0);
  CHECK(off.grad(0, 0) == doctest::Approx(2.0 / 6.0));
  CHECK_THROWS_AS(mse_loss(Matrix(3, 2), Matrix(2, 3)), ShapeError);
}

TEST_CASE("mse gradient matches finite differences") {
  data::SeededPrng prng(1);
  Matrix p(4, 3), t(4, 3);
  for (double& v : p.data()) v = prng.uniform(-2, 2);
  for (double& v : t.data()) v = prng.uniform(-2, 2);
  const LossResult r = mse_loss(p, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    Matrix up = p, dn = p;
    up.data()[i] += 1e-6;
    dn.data()[i] -= 1e-6;
    const double fd = (mse_loss(up, t).loss - mse_loss(dn, t).loss) / 2e-6;
    CHECK(std::abs(fd - r.grad.data()[i]) <= 1e-7 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("cross entropy of uniform logits is ln C") {
  const std::vector<std::uint32_t> labels{0, 3, 6};
  const LossResult r = softmax_cross_entropy(Matrix(3, 7, 0.25), labels);
  CHECK(r.loss == doctest::Approx(std::log(7.0)).epsilon(1e-14));
}

TEST_CASE("cross entropy vanishes at a large margin") {
  Matrix logits(2, 4, 0.0);
  logits(0, 1) = 50.0;
  logits(1, 3) = 50.0;
  const std::vector<std::uint32_t> labels{1, 3};
  const LossResult r = softmax_cross_entropy(logits, labels);
  CHECK(r.loss < 1e-20);
  CHECK(r.loss >= 0.0);
  // and stays finite when the wrong class dominates
  logits(0, 0) = 1000.0;
  const LossResult w = softmax_cross_entropy(logits, labels);
  CHECK(std::isfinite(w.loss));
  CHECK(w.loss > 400.0);
}

TEST_CASE("cross entropy gradient: rows sum to zero and match finite differences") {
  data::SeededPrng prng(2);
  Matrix logits(5, 6);
  for (double& v : logits.data()) v = prng.uniform(-3, 3);
  const std::vector<std::uint32_t> labels{0, 5, 2, 2, 4};
  const LossResult r = softmax_cross_entropy(logits, labels);
  for (std::size_t i = 0; i < 5; ++i) {
    double s = 0.0;
    for (double g : r.grad.row_span(i)) s += g;
    CHECK(std::abs(s) <= 1e-12);
  }
  for (std::size_t i = 0; i < logits.size(); ++i) {
    Matrix up = logits, dn = logits;
    up.data()[i] += 1e-6;
    dn.data()[i] -= 1e-6;
    const double fd = (softmax_cross_entropy(up, labels).loss -
                       softmax_cross_entropy(dn, labels).loss) / 2e-6;
    CHECK(std::abs(fd - r.grad.data()[i]) <= 1e-6);
  }
}

TEST_CASE("cross entropy rejects bad labels") {
  const std::vector<std::uint32_t> bad{0, 9};
  CHECK_THROWS_AS(softmax_cross_entropy(Matrix(2, 3), bad), std::out_of_range);
  const std::vector<std::uint32_t> short_labels{0};
  CHECK_THROWS_AS(softmax_cross_entropy(Matrix(2, 3), short_labels), ShapeError);
}

TEST_CASE("top-k trivial cases") {
  data::SeededPrng prng(3);
  Matrix logits(10, 4);
  for (double& v : logits.data()) v = prng.uniform();
  std::vector<std::uint32_t> labels(10);
  for (auto& l : labels) l = static_cast<std::uint32_t>(prng.below(4));
  CHECK(topk_accuracy(logits, labels, 4) == 1.0);

  Matrix onehot(10, 4, 0.0);
  for (std::size_t i = 0; i < 10; ++i) onehot(i, labels[i]) = 1.0;
  CHECK(topk_accuracy(onehot, labels, 1) == 1.0);

  CHECK_THROWS_AS(topk_accuracy(logits, labels, 0), std::out_of_range);
  CHECK_THROWS_AS(topk_accuracy(logits, labels, 5), std::out_of_range);
}

TEST_CASE("top-k ties go to the lower class index") {
  const Matrix flat(1, 5, 0.0);
  const std::vector<std::uint32_t> low{1}, high{2};
  CHECK(topk_accuracy(flat, low, 2) == 1.0);
  CHECK(topk_accuracy(flat, high, 2) == 0.0);
}

TEST_CASE("top-k matches a brute-force sort") {
  data::SeededPrng prng(4);
  Matrix logits(100, 10);
  // coarse values so that ties actually occur
  for (double& v : logits.data()) v = static_cast<double>(prng.below(6));
  std::vector<std::uint32_t> labels(100);
  for (auto& l : labels) l = static_cast<std::uint32_t>(prng.below(10));

  for (std::size_t k = 1; k <= 10; ++k) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < 100; ++r) {
      std::vector<std::size_t> order(10);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return logits(r, a) > logits(r, b); });
      if (std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), labels[r]) !=
          order.begin() + static_cast<std::ptrdiff_t>(k))
        ++hits;
    }
    CHECK(topk_accuracy(logits, labels, k) == static_cast<double>(hits) / 100.0);
  }
}
