#include "krf/tensor.hpp"

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "krf/errors.hpp"

using krf::Tape;
using krf::Tensor;
using krf_test::random_tensor;

namespace {

// Finite-difference check of a single op: every input entry is a parameter.
double op_fd_error(const std::function<Tensor(Tape&, const Tensor&)>& op,
                   const Tensor& x) {
  Tensor input = x.detached_copy();
  input.set_requires_grad(true);
  auto report = krf::grad_check(
      [&](Tape& t) { return t.sum(op(t, input)); }, {{"x", input}}, 1e-5);
  return report.max_rel_err;
}

}  // namespace

TEST_CASE("matmul identity and hand-computed products") {
  Tape tape;
  Tensor eye = Tensor::from({2, 2}, {1, 0, 0, 1});
  Tensor m = Tensor::from({2, 2}, {3.5, -1.0, 2.25, 7.0});
  Tensor out = tape.matmul(eye, m);
  for (std::size_t i = 0; i < 4; ++i) CHECK(out.data()[i] == m.data()[i]);

  Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from({2, 1}, {5, 6});
  Tensor c = tape.matmul(a, b);
  CHECK(c.at(0, 0) == doctest::Approx(17.0));
  CHECK(c.at(1, 0) == doctest::Approx(39.0));
}

TEST_CASE("matmul rejects mismatched shapes naming both") {
  Tape tape;
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({2, 3});
  try {
    tape.matmul(a, b);
    FAIL("expected shape error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(2,3)") != std::string::npos);
  }
}

TEST_CASE("matmul gradient of sum(A*B) wrt A equals ones * B^T") {
  krf::Rng rng(11);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 2}, rng);
  a.set_requires_grad(true);

  Tape tape;
  Tensor loss = tape.sum(tape.matmul(a, b));
  tape.backward(loss);

  // d sum(AB)/dA[i,k] = sum_j B[k,j]
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      double expect = 0.0;
      for (std::size_t j = 0; j < 2; ++j) expect += b.at(k, j);
      CHECK(a.grad()[i * 4 + k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  // and the finite-difference oracle agrees
  CHECK(op_fd_error([&](Tape& t, const Tensor& x) { return t.matmul(x, b); }, a) < 1e-4);
}

TEST_CASE("elementwise trivial values") {
  Tape tape;
  CHECK(tape.relu(Tensor::scalar(-3.0)).item() == 0.0);
  CHECK(tape.sigmoid(Tensor::scalar(0.0)).item() == doctest::Approx(0.5));
  CHECK(tape.leaky_relu(Tensor::scalar(-2.0), 0.01).item() ==
        doctest::Approx(-0.02));
  CHECK(tape.exp(Tensor::scalar(0.0)).item() == doctest::Approx(1.0));
  CHECK(tape.log(Tensor::scalar(1.0)).item() == doctest::Approx(0.0));
}

TEST_CASE("log of non-positive values is a domain error") {
  Tape tape;
  CHECK_THROWS_AS(tape.log(Tensor::scalar(0.0)), std::domain_error);
  CHECK_THROWS_AS(tape.log(Tensor::scalar(-1.0)), std::domain_error);
}

TEST_CASE("elementwise accepts equal shapes and scalars, rejects the rest") {
  Tape tape;
  Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from({2, 2}, {10, 20, 30, 40});
  Tensor sum = tape.add(a, b);
  CHECK(sum.at(1, 1) == 44.0);

  Tensor scaled = tape.mul(a, 3.0);
  CHECK(scaled.at(1, 0) == 9.0);
  Tensor flipped = tape.sub(1.0, a);
  CHECK(flipped.at(0, 1) == -1.0);

  Tensor wrong = Tensor::zeros({3, 2});
  CHECK_THROWS_AS(tape.add(a, wrong), std::invalid_argument);
  CHECK_THROWS_AS(tape.mul(a, Tensor::zeros({4})), std::invalid_argument);
}

TEST_CASE("sigmoid symmetry holds to 1e-12") {
  krf::Rng rng(3);
  Tape tape;
  Tensor x = random_tensor({40}, rng, -8.0, 8.0);
  Tensor pos = tape.sigmoid(x);
  Tensor neg = tape.sigmoid(tape.mul(x, -1.0));
  for (std::size_t i = 0; i < x.numel(); ++i) {
    CHECK(pos.data()[i] + neg.data()[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("softmax uniform, stability, and frozen values") {
  Tape tape;
  Tensor uniform = tape.softmax(Tensor::from({3}, {0, 0, 0}), 0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(uniform.data()[i] == doctest::Approx(1.0 / 3.0));
  }

  Tensor big = tape.softmax(Tensor::from({2}, {1000, 1000}), 0);
  CHECK(big.data()[0] == doctest::Approx(0.5));
  CHECK(big.data()[1] == doctest::Approx(0.5));
  CHECK(big.all_finite());

  Tensor frozen = tape.softmax(Tensor::from({3}, {1, 2, 3}), 0);
  CHECK(frozen.data()[0] == doctest::Approx(0.09003057).epsilon(1e-7));
  CHECK(frozen.data()[1] == doctest::Approx(0.24472847).epsilon(1e-7));
  CHECK(frozen.data()[2] == doctest::Approx(0.66524096).epsilon(1e-7));
}

TEST_CASE("softmax rows sum to one and entries stay in (0,1)") {
  krf::Rng rng(17);
  for (int it = 0; it < 20; ++it) {
    Tape tape;
    Tensor x = random_tensor({4, 7}, rng, -30.0, 30.0);
    Tensor y = tape.softmax(x, 1);
    for (std::size_t r = 0; r < 4; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < 7; ++c) {
        const double v = y.at(r, c);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        total += v;
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
    // column-wise softmax normalizes columns instead
    Tensor yc = tape.softmax(x, 0);
    for (std::size_t c = 0; c < 7; ++c) {
      double total = 0.0;
      for (std::size_t r = 0; r < 4; ++r) total += yc.at(r, c);
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("concat joins vectors and matrices") {
  Tape tape;
  Tensor joined = tape.concat(Tensor::from({2}, {1, 2}), Tensor::from({1}, {3}), 0);
  CHECK(joined.shape() == std::vector<std::size_t>{3});
  CHECK(joined.data() == std::vector<double>{1, 2, 3});

  Tensor wide = tape.concat(Tensor::zeros({2, 3}), Tensor::zeros({2, 5}), 1);
  CHECK(wide.shape() == std::vector<std::size_t>{2, 8});

  CHECK_THROWS_AS(tape.concat(Tensor::zeros({2, 3}), Tensor::zeros({3, 3}), 1),
                  std::invalid_argument);
}

TEST_CASE("concat backward splits the gradient into ones") {
  krf::Rng rng(5);
  Tensor a = random_tensor({2, 3}, rng);
  Tensor b = random_tensor({2, 5}, rng);
  a.set_requires_grad(true);
  b.set_requires_grad(true);
  Tape tape;
  tape.backward(tape.sum(tape.concat(a, b, 1)));
  for (double g : a.grad()) CHECK(g == doctest::Approx(1.0));
  for (double g : b.grad()) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("every differentiable op matches finite differences") {
  krf::Rng rng(23);
  Tensor x = random_tensor({3, 5}, rng, -2.0, 2.0, 1e-3);
  Tensor pos = random_tensor({3, 5}, rng, 0.1, 2.0);
  Tensor other = random_tensor({3, 5}, rng);
  Tensor mat = random_tensor({5, 4}, rng);

  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.tanh(v); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.sigmoid(v); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.relu(v); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.leaky_relu(v, 0.01); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.exp(v); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.log(v); }, pos) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.add(v, other); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.sub(v, other); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.mul(v, other); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.mul(v, -1.7); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.sub(2.0, v); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.matmul(v, mat); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.transpose(v); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.softmax(v, 1); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.softmax(v, 0); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.slice_rows(v, 1, 3); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.slice_cols(v, 0, 2); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.mean(v); }, x) < 1e-4);
  CHECK(op_fd_error([&](Tape& t, const Tensor& v) { return t.concat(v, other, 0); }, x) < 1e-4);
  CHECK(op_fd_error(
            [&](Tape& t, const Tensor& v) { return t.gather_rows(v, {0, 2, 2, 1}); }, x) < 1e-4);

  // scalar broadcast against a tensor
  Tensor s = Tensor::scalar(0.75);
  s.set_requires_grad(true);
  auto rep = krf::grad_check(
      [&](Tape& t) { return t.sum(t.mul(s, other)); }, {{"s", s}}, 1e-5);
  CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("bce_with_logits matches the closed forms") {
  Tape tape;
  // 22 zero logits: per-sample loss is 22 log 2
  Tensor scores = Tensor::zeros({1, 22});
  Tensor gold = Tensor::zeros({1, 22});
  Tensor loss = tape.bce_with_logits(scores, gold);
  CHECK(loss.item() == doctest::Approx(22.0 * std::log(2.0)).epsilon(1e-12));

  // saturated positive logit with a positive target contributes ~0
  Tensor sat = tape.bce_with_logits(Tensor::from({1, 1}, {40.0}),
                                    Tensor::from({1, 1}, {1.0}));
  CHECK(sat.item() < 1e-12);
  CHECK(sat.item() >= 0.0);

  // loss is non-negative on random inputs
  krf::Rng rng(9);
  Tensor rnd = random_tensor({4, 6}, rng, -5.0, 5.0);
  Tensor targets = Tensor::zeros({4, 6});
  for (double& v : targets.data()) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
  CHECK(tape.bce_with_logits(rnd, targets).item() >= 0.0);
}

TEST_CASE("bce_with_logits gradient matches finite differences") {
  krf::Rng rng(31);
  Tensor logits = random_tensor({3, 4}, rng, -3.0, 3.0);
  Tensor targets = Tensor::zeros({3, 4});
  for (double& v : targets.data()) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
  logits.set_requires_grad(true);
  auto rep = krf::grad_check(
      [&](Tape& t) { return t.bce_with_logits(logits, targets); },
      {{"logits", logits}}, 1e-5);
  CHECK(rep.max_rel_err < 1e-4);
  CHECK_THROWS_AS(Tape().bce_with_logits(Tensor::zeros({2, 2}),
                                         Tensor::from({2, 2}, {0, 1, 0.5, 0})),
                  std::invalid_argument);
}

TEST_CASE("gradients accumulate through shared nodes") {
  // z = (x*x)*(x*x) = x^4, dz/dx = 4x^3
  Tensor x = Tensor::scalar(1.3);
  x.set_requires_grad(true);
  Tape tape;
  Tensor y = tape.mul(x, x);
  Tensor z = tape.mul(y, y);
  tape.backward(z);
  CHECK(x.grad()[0] == doctest::Approx(4.0 * std::pow(1.3, 3)).epsilon(1e-12));
}

TEST_CASE("backward can run only once and needs a scalar") {
  Tensor x = Tensor::scalar(2.0);
  x.set_requires_grad(true);
  Tape tape;
  Tensor y = tape.mul(x, x);
  tape.backward(y);
  CHECK_THROWS_AS(tape.backward(y), std::logic_error);

  Tape t2;
  Tensor m = Tensor::zeros({2, 2});
  CHECK_THROWS_AS(t2.backward(m), std::invalid_argument);
}

TEST_CASE("grad_check on simple closed forms") {
  // f(theta) = theta^2 at theta = 3: gradient 6
  Tensor theta = Tensor::scalar(3.0);
  theta.set_requires_grad(true);
  auto quad = krf::grad_check(
      [&](Tape& t) { return t.mul(theta, theta); }, {{"theta", theta}}, 1e-5);
  CHECK(quad.entries[0].analytic == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(quad.entries[0].numeric == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(quad.max_rel_err < 1e-6);

  // constant f: all gradients zero
  Tensor unused = Tensor::scalar(1.0);
  unused.set_requires_grad(true);
  auto constant = krf::grad_check(
      [&](Tape&) { return Tensor::scalar(5.0); }, {{"unused", unused}}, 1e-5);
  CHECK(constant.entries[0].analytic == 0.0);
  CHECK(constant.entries[0].numeric == 0.0);
  CHECK(constant.max_rel_err == 0.0);

  // non-finite loss aborts with a diagnostic
  CHECK_THROWS_AS(krf::grad_check(
                      [&](Tape& t) {
                        return t.mul(theta, std::numeric_limits<double>::infinity());
                      },
                      {{"theta", theta}}, 1e-5),
                  krf::NumericError);
}

TEST_CASE("forward results are deterministic for identical inputs") {
  auto run = [] {
    krf::Rng rng(77);
    Tape tape;
    Tensor a = random_tensor({4, 4}, rng);
    Tensor b = random_tensor({4, 4}, rng);
    return tape.softmax(tape.matmul(tape.tanh(a), b), 1);
  };
  Tensor first = run();
  Tensor second = run();
  REQUIRE(first.numel() == second.numel());
  for (std::size_t i = 0; i < first.numel(); ++i) {
    CHECK(first.data()[i] == second.data()[i]);  // bit identical
  }
}

TEST_CASE("non-recording tapes compute values without closures") {
  Tensor x = Tensor::scalar(2.0);
  x.set_requires_grad(true);
  Tape tape(false);
  Tensor y = tape.mul(x, x);
  CHECK(y.item() == 4.0);
  CHECK(tape.op_count() == 0);
}
