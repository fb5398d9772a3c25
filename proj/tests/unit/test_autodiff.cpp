#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "overlap/autodiff/ops.hpp"
#include "overlap/autodiff/svd.hpp"
#include "overlap/error.hpp"
#include "support.hpp"

using namespace overlap;
using namespace overlap::ad;
using testsupport::finite_difference;
using testsupport::max_abs_diff;
using testsupport::to_vec;

namespace {

// Reverse-mode gradient of a scalar function built from one parameter tensor.
std::vector<double> tape_gradient(const Shape& shape, const std::vector<double>& x,
                                  const std::function<Tensor(const Tensor&)>& f) {
  Tensor p = Tensor::parameter(shape, x);
  Tape tape;
  Tensor out = f(p);
  tape.backward(out);
  return to_vec(p.grad());
}

double eval(const Shape& shape, const std::vector<double>& x, const std::function<Tensor(const Tensor&)>& f) {
  return f(Tensor::constant(shape, x)).item();
}

}  // namespace

TEST_CASE("matmul: identity and hand arithmetic") {
  Tensor eye = Tensor::constant({2, 2}, {1, 0, 0, 1});
  Tensor a = Tensor::constant({2, 2}, {1, 2, 3, 4});
  CHECK(to_vec(matmul(eye, a).data()) == to_vec(a.data()));

  Tensor ones = Tensor::constant({2, 1}, {1, 1});
  Tensor r = matmul(a, ones);
  CHECK(r.shape() == Shape{2, 1});
  CHECK(r.data()[0] == 3.0);
  CHECK(r.data()[1] == 7.0);

  CHECK_THROWS_AS(matmul(a, Tensor::constant({3, 1}, {1, 1, 1})), DimensionError);
}

TEST_CASE("matmul: gradient matches central differences on 3x4 . 4x2") {
  const auto a = testsupport::uniform(12, -2, 2, 11);
  const auto b = testsupport::uniform(8, -2, 2, 12);
  Tensor bt = Tensor::constant({4, 2}, b);
  auto f = [&](const Tensor& x) { return sum(square(matmul(x, bt))); };
  const auto analytic = tape_gradient({3, 4}, a, f);
  const auto numeric = finite_difference([&](const std::vector<double>& x) { return eval({3, 4}, x, f); }, a, 1e-5);
  CHECK(max_abs_diff(analytic, numeric) < 1e-6);

  // Right operand too.
  Tensor at = Tensor::constant({3, 4}, a);
  auto g = [&](const Tensor& y) { return sum(square(matmul(at, y))); };
  const auto analytic_b = tape_gradient({4, 2}, b, g);
  const auto numeric_b = finite_difference([&](const std::vector<double>& y) { return eval({4, 2}, y, g); }, b, 1e-5);
  CHECK(max_abs_diff(analytic_b, numeric_b) < 1e-6);
}

TEST_CASE("elementwise ops: trivial values and silu slope") {
  CHECK(silu(Tensor::scalar(0.0)).item() == 0.0);
  CHECK(sum(Tensor::zeros({3, 5})).item() == 0.0);

  auto f = [](const Tensor& x) { return sum(silu(x)); };
  const auto analytic = tape_gradient({1}, {1.0}, f);
  const auto numeric = finite_difference([&](const std::vector<double>& x) { return eval({1}, x, f); }, {1.0}, 1e-5);
  CHECK(std::abs(analytic[0] - numeric[0]) < 1e-6);

  CHECK_THROWS_AS(add(Tensor::zeros({2}), Tensor::zeros({3})), DimensionError);
  CHECK_THROWS_AS(mul(Tensor::zeros({2, 2}), Tensor::zeros({4})), DimensionError);
  CHECK_THROWS_AS(concat(Tensor::zeros({2, 2}), Tensor::zeros({3, 2})), DimensionError);
  CHECK_THROWS_AS(Tensor::constant({2, 2}, {1, 2, 3}), DimensionError);
}

TEST_CASE("every differentiable op agrees with finite differences on [-2, 2]") {
  Tensor other = Tensor::constant({3, 4}, testsupport::uniform(12, -2, 2, 99));
  Tensor bias = Tensor::constant({4}, testsupport::uniform(4, -2, 2, 98));
  Tensor right = Tensor::constant({4, 3}, testsupport::uniform(12, -2, 2, 97));
  Tensor side = Tensor::constant({3, 2}, testsupport::uniform(6, -2, 2, 96));
  const std::vector<double> labels{1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1};

  std::vector<std::pair<std::string, std::function<Tensor(const Tensor&)>>> cases = {
      {"add", [&](const Tensor& x) { return sum(square(add(x, other))); }},
      {"sub", [&](const Tensor& x) { return sum(square(sub(other, x))); }},
      {"mul", [&](const Tensor& x) { return sum(mul(x, other)); }},
      {"mul-self", [&](const Tensor& x) { return sum(mul(x, x)); }},
      {"scale", [&](const Tensor& x) { return sum(square(scale(x, -1.7))); }},
      {"add_bias", [&](const Tensor& x) { return sum(square(add_bias(x, bias))); }},
      {"silu", [&](const Tensor& x) { return sum(mul(silu(x), other)); }},
      {"sigmoid", [&](const Tensor& x) { return sum(mul(sigmoid(x), other)); }},
      {"square", [&](const Tensor& x) { return sum(mul(square(x), other)); }},
      {"mean", [&](const Tensor& x) { return mean(square(x)); }},
      {"matmul", [&](const Tensor& x) { return sum(square(matmul(x, right))); }},
      {"transpose", [&](const Tensor& x) { return sum(mul(transpose(x), transpose(other))); }},
      {"concat", [&](const Tensor& x) { return sum(square(matmul(concat(x, side), Tensor::constant({6, 1}, {1, -2, 3, 0.5, 1, 2})))); }},
      {"reshape", [&](const Tensor& x) { return sum(square(matmul(reshape(x, {4, 3}), transpose(right)))); }},
      {"outer_rows", [&](const Tensor& x) { return sum(square(outer_rows(x, side))); }},
      {"normalize_rows", [&](const Tensor& x) { return sum(mul(normalize_rows(x), other)); }},
      {"bce", [&](const Tensor& x) { return bce_with_logits(x, labels); }},
      {"diag_ce", [&](const Tensor& x) { return diagonal_cross_entropy(matmul(x, right)); }},
      {"singular_values", [&](const Tensor& x) { return sum(mul(singular_values(x), Tensor::constant({3}, {1.0, 0.5, -0.3}))); }},
  };

  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const auto x = testsupport::uniform(12, -2, 2, 1000 + trial);
    for (auto& [name, f] : cases) {
      CAPTURE(name);
      CAPTURE(trial);
      const auto analytic = tape_gradient({3, 4}, x, f);
      const auto numeric = finite_difference([&](const std::vector<double>& v) { return eval({3, 4}, v, f); }, x, 1e-5);
      CHECK(max_abs_diff(analytic, numeric) < 1e-5);
    }
  }
}

TEST_CASE("shared subexpressions accumulate gradients") {
  Tensor x = Tensor::parameter({1}, {3.0});
  Tape tape;
  Tensor y = add(x, x);
  tape.backward(y);
  CHECK(x.grad()[0] == doctest::Approx(2.0));
}

TEST_CASE("tape replays once and leaves accumulate across passes") {
  Tensor x = Tensor::parameter({2}, {1.0, -1.0});
  {
    Tape tape;
    Tensor y = sum(square(x));
    tape.backward(y);
    CHECK_THROWS_AS(tape.backward(y), StateError);
  }
  {
    Tape tape;
    tape.backward(sum(x));
  }
  CHECK(x.grad()[0] == doctest::Approx(3.0));
  CHECK(x.grad()[1] == doctest::Approx(-1.0));
  x.zero_grad();
  CHECK(x.grad()[0] == 0.0);
}

TEST_CASE("no tape means no recording") {
  Tensor x = Tensor::parameter({2}, {1.0, 2.0});
  Tensor y = sum(square(x));
  CHECK_FALSE(y.requires_grad());
}

TEST_CASE("svd: diagonal, rank-1 and reconstruction") {
  Eigen::MatrixXd d(2, 2);
  d << 3, 0, 0, 1;
  auto dec = jacobi_svd(d);
  CHECK(dec.s(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(dec.s(1) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd u(4), v(3);
  u << 1, -2, 0.5, 3;
  v << 0.3, 2, -1;
  auto r1 = jacobi_svd(u * v.transpose());
  int above = 0;
  for (Eigen::Index i = 0; i < r1.s.size(); ++i) above += r1.s(i) > 1e-12 ? 1 : 0;
  CHECK(above == 1);

  const auto vals = testsupport::uniform(16, -2, 2, 5);
  Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(vals.data());
  auto full = jacobi_svd(m);
  const Eigen::MatrixXd recon = full.u * full.s.asDiagonal() * full.v.transpose();
  CHECK((recon - m).norm() < 1e-10);
  for (Eigen::Index i = 0; i + 1 < full.s.size(); ++i) CHECK(full.s(i) >= full.s(i + 1));
  CHECK((full.u.transpose() * full.u - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
  CHECK((full.v.transpose() * full.v - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);

  Eigen::MatrixXd bad = m;
  bad(1, 2) = std::nan("");
  CHECK_THROWS_AS(jacobi_svd(bad), NumericError);
}

TEST_CASE("svd: transpose has the same singular values; wide and tall shapes reconstruct") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t rows = 1 + seed % 7, cols = 1 + (seed * 3) % 9;
    const auto vals = testsupport::uniform(rows * cols, -2, 2, 200 + seed);
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = vals[i * cols + j];
    auto a = jacobi_svd(m);
    auto b = jacobi_svd(m.transpose());
    CHECK((a.s - b.s).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.u * a.s.asDiagonal() * a.v.transpose() - m).norm() < 1e-10);
    CHECK(a.s.minCoeff() >= 0.0);
  }
}

TEST_CASE("singular value gradient averages over repeated values") {
  // Identity has a single repeated singular value; d(s_0)/dM averaged over the
  // group gives I/2 for a 2x2 identity.
  Tensor m = Tensor::parameter({2, 2}, {1, 0, 0, 1});
  Tape tape;
  Tensor s = singular_values(m);
  Tensor first = sum(mul(s, Tensor::constant({2}, {1.0, 0.0})));
  tape.backward(first);
  CHECK(m.grad()[0] == doctest::Approx(0.5));
  CHECK(m.grad()[3] == doctest::Approx(0.5));
  CHECK(m.grad()[1] == doctest::Approx(0.0));
}
