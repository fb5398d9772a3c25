#include "overlap/synth/probes.hpp"

#include <algorithm>
#include <cmath>

#include "overlap/autodiff/ops.hpp"
#include "overlap/autodiff/optim.hpp"
#include "overlap/error.hpp"
#include "overlap/hash.hpp"
#include "overlap/uoo/model.hpp"

namespace overlap::synth {

namespace {

Eigen::MatrixXd features(const Dataset& ds, const std::vector<std::size_t>& rows, Modality which) {
  const std::size_t d = kFeatureDim;
  const Eigen::Index cols = which == Modality::both ? 2 * d : d;
  Eigen::MatrixXd f(static_cast<Eigen::Index>(rows.size()), cols + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    f(i, 0) = 1.0;
    Eigen::Index c = 1;
    if (which != Modality::y)
      for (std::size_t k = 0; k < d; ++k) f(i, c++) = ds.x[rows[r] * d + k];
    if (which != Modality::x)
      for (std::size_t k = 0; k < d; ++k) f(i, c++) = ds.y[rows[r] * d + k];
  }
  return f;
}

Eigen::VectorXd targets(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) t(static_cast<Eigen::Index>(r)) = ds.labels[rows[r]];
  return t;
}

double accuracy(const Eigen::VectorXd& score, const Eigen::VectorXd& label, double cut) {
  std::size_t hit = 0;
  for (Eigen::Index i = 0; i < score.size(); ++i) hit += ((score(i) > cut) == (label(i) > 0.5)) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(std::max<Eigen::Index>(1, score.size()));
}

double majority(const Eigen::VectorXd& train, const Eigen::VectorXd& test) {
  const bool one = train.mean() >= 0.5;
  double hit = 0.0;
  for (Eigen::Index i = 0; i < test.size(); ++i) hit += ((test(i) > 0.5) == one) ? 1.0 : 0.0;
  return hit / static_cast<double>(std::max<Eigen::Index>(1, test.size()));
}

std::vector<double> rows_of(const std::vector<double>& buf, const std::vector<std::size_t>& rows) {
  const std::size_t d = kFeatureDim;
  std::vector<double> out;
  out.reserve(rows.size() * d);
  for (std::size_t r : rows) out.insert(out.end(), buf.begin() + static_cast<std::ptrdiff_t>(r * d), buf.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
  return out;
}

}  // namespace

double linear_probe(const Dataset& ds, Modality which, std::uint64_t seed) {
  if (ds.n < 10) throw ParameterError("linear probe needs at least 10 rows");
  const auto split = split_rows(ds.n, seed);
  const Eigen::MatrixXd a = features(ds, split.train, which);
  const Eigen::VectorXd t = targets(ds, split.train);
  const double ridge = 1e-3 * static_cast<double>(a.rows());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(a.cols());
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd p = (1.0 + (-(a * w).array()).exp()).inverse().matrix();
    const Eigen::VectorXd s = (p.array() * (1.0 - p.array())).matrix();
    Eigen::VectorXd g = a.transpose() * (p - t) + ridge * w;
    Eigen::MatrixXd h = a.transpose() * s.asDiagonal() * a;
    h.diagonal().array() += ridge;
    const Eigen::VectorXd step = h.ldlt().solve(g);
    w -= step;
    if (step.norm() < 1e-10 * (1.0 + w.norm())) break;
  }
  return accuracy(features(ds, split.test, which) * w, targets(ds, split.test), 0.0);
}

double bilinear_probe(const Dataset& ds, std::uint64_t seed) {
  if (ds.n < 10) throw ParameterError("bilinear probe needs at least 10 rows");
  const auto split = split_rows(ds.n, seed);
  const Eigen::MatrixXd xtr = features(ds, split.train, Modality::x).rightCols(kFeatureDim);
  const Eigen::MatrixXd ytr = features(ds, split.train, Modality::y).rightCols(kFeatureDim);
  const Eigen::MatrixXd xte = features(ds, split.test, Modality::x).rightCols(kFeatureDim);
  const Eigen::MatrixXd yte = features(ds, split.test, Modality::y).rightCols(kFeatureDim);
  Eigen::MatrixXd k = ((xtr * xtr.transpose()).array() * (ytr * ytr.transpose()).array() + 1.0).matrix();
  const double ridge = 1e-2 * k.diagonal().mean();
  k.diagonal().array() += ridge;
  const Eigen::VectorXd t = (2.0 * targets(ds, split.train).array() - 1.0).matrix();
  const Eigen::VectorXd alpha = k.llt().solve(t);
  const Eigen::MatrixXd kt = ((xte * xtr.transpose()).array() * (yte * ytr.transpose()).array() + 1.0).matrix();
  return accuracy(kt * alpha, targets(ds, split.test), 0.0);
}

double separable_ceiling(const Dataset& ds, std::uint64_t seed, const CeilingOptions& o) {
  if (ds.n < 200) throw ParameterError("separable ceiling needs n >= 200");
  const auto split = split_rows(ds.n, seed);
  const Eigen::VectorXd ttr = targets(ds, split.train), tte = targets(ds, split.test);
  const double floor = majority(ttr, tte);

  const std::size_t d = kFeatureDim, h = o.hidden;
  const auto xtr = ad::Tensor::constant({split.train.size(), d}, rows_of(ds.x, split.train));
  const auto ytr = ad::Tensor::constant({split.train.size(), d}, rows_of(ds.y, split.train));
  std::vector<double> labels(ttr.data(), ttr.data() + ttr.size());

  std::uint64_t stream = 0;
  auto next = [&] { return mix_seed(seed, 100 + stream++); };
  auto w1 = uoo::init_uniform({d, h}, d, next()), b1 = uoo::init_uniform({h}, d, next());
  auto w2 = uoo::init_uniform({h, 1}, h, next()), b2 = uoo::init_uniform({1}, h, next());
  auto v1 = uoo::init_uniform({d, h}, d, next()), c1 = uoo::init_uniform({h}, d, next());
  auto v2 = uoo::init_uniform({h, 1}, h, next()), c2 = uoo::init_uniform({1}, h, next());
  const std::vector<ad::Tensor> params{w1, b1, w2, b2, v1, c1, v2, c2};
  auto logit = [&](const ad::Tensor& x, const ad::Tensor& y) {
    const auto f = ad::linear(ad::silu(ad::linear(x, w1, b1)), w2, b2);
    const auto g = ad::linear(ad::silu(ad::linear(y, v1, c1)), v2, c2);
    return ad::add(f, g);
  };
  ad::Adam opt(params, {.learning_rate = o.learning_rate});
  for (int e = 0; e < o.epochs; ++e) {
    opt.zero_grad();
    ad::Tape tape;
    tape.backward(ad::bce_with_logits(logit(xtr, ytr), labels));
    opt.step();
  }
  const auto xte = ad::Tensor::constant({split.test.size(), d}, rows_of(ds.x, split.test));
  const auto yte = ad::Tensor::constant({split.test.size(), d}, rows_of(ds.y, split.test));
  const auto out = logit(xte, yte);
  const Eigen::VectorXd score = Eigen::Map<const Eigen::VectorXd>(out.data().data(), static_cast<Eigen::Index>(out.size()));
  return std::max(floor, accuracy(score, tte, 0.0));
}

}  // namespace overlap::synth
