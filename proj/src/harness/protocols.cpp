#include "overlap/harness/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "overlap/error.hpp"
#include "overlap/stats/density.hpp"

namespace overlap::harness {

namespace {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Results are keyed by
// index, so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) { return v.size() < 2 ? 0.0 : std::sqrt(stats::variance(v)); }

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json summary(std::span<const double> v) {
  return {{"mean", mean_of(v)}, {"sd", sd_of(v)}, {"values", std::vector<double>(v.begin(), v.end())}};
}

std::optional<double> safe_pearson(std::span<const double> a, std::span<const double> b) {
  try {
    return stats::pearson(a, b);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::filesystem::path run_path(const std::filesystem::path& root, const std::string& name, std::uint64_t seed) {
  if (root.empty()) return {};
  return root / name / ("seed_" + std::to_string(seed));
}

nlohmann::json paired_json(const PairedTest& t) {
  return {{"pairs", t.pairs}, {"mean_difference", t.mean_difference}, {"sd_difference", t.sd_difference},
          {"t", t.t}, {"p_value", t.p_value}};
}

}  // namespace

PairedTest paired_one_sided(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) throw DimensionError("paired test needs equal-length samples");
  PairedTest r;
  r.pairs = first.size();
  std::vector<double> d(first.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = first[i] - second[i];
  r.mean_difference = mean_of(d);
  if (d.size() < 2) return r;
  r.sd_difference = sd_of(d);
  if (r.sd_difference == 0.0) {
    r.p_value = r.mean_difference > 0.0 ? 0.0 : 1.0;
    r.t = r.mean_difference > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return r;
  }
  r.t = r.mean_difference / (r.sd_difference / std::sqrt(static_cast<double>(d.size())));
  const boost::math::students_t dist(static_cast<double>(d.size() - 1));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.t));
  return r;
}

nlohmann::json ConditionSummary::to_json() const {
  return {{"condition", harness::to_string(condition)},
          {"parameter_count", parameter_count},
          {"test_accuracy", summary(test_accuracy)},
          {"transfer_accuracy", summary(transfer_accuracy)},
          {"tau", summary(tension)},
          {"ns", summary(ns)}};
}

nlohmann::json PocReport::to_json() const {
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : runs) runs_json.push_back(r.to_json());
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : conditions) conds.push_back(c.to_json());
  return {{"runs", runs_json},
          {"conditions", conds},
          {"capacity_spread", capacity_spread},
          {"gate", gate ? nlohmann::json(*gate) : nlohmann::json(nullptr)},
          {"transfer_test", paired_json(transfer_test)},
          {"tau_test", paired_json(tension_test)},
          {"underpowered", underpowered},
          {"ordering_uoo_gt_ode_gt_contrastive", ordering_holds},
          {"aborted", aborted}};
}

std::vector<std::pair<Condition, std::size_t>> capacity(const ExperimentConfig& cfg) {
  std::vector<std::pair<Condition, std::size_t>> out;
  for (Condition c : {Condition::uoo, Condition::ode_ablation, Condition::contrastive}) {
    auto k = cfg;
    k.condition = c;
    out.emplace_back(c, build_network(k, 0)->parameter_count());
  }
  return out;
}

PocReport run_poc(const ExperimentConfig& cfg, const PocOptions& o) {
  validate(cfg);
  PocReport rep;
  const double budget = static_cast<double>(cfg.param_budget);
  for (const auto& [c, count] : capacity(cfg)) {
    const double spread = std::abs(static_cast<double>(count) - budget) / budget;
    rep.capacity_spread = std::max(rep.capacity_spread, spread);
    if (spread > 0.05)
      throw CapacityError(to_string(c) + " has " + std::to_string(count) + " parameters, more than 5% from the budget");
  }
  rep.underpowered = cfg.seeds.size() < 3;
  const std::vector<Condition> conds{Condition::uoo, Condition::ode_ablation,
                                     o.placebo ? Condition::uoo : Condition::contrastive};
  const std::vector<std::string> names{"uoo", "ode_ablation", o.placebo ? "uoo_placebo" : "contrastive"};
  const std::size_t k = cfg.seeds.size();
  std::vector<RunData> data(k);
  for (std::size_t s = 0; s < k; ++s) data[s] = make_run_data(cfg, cfg.seeds[s], true);
  rep.runs.resize(conds.size() * k);
  parallel_for(rep.runs.size(), o.jobs, [&](std::size_t i) {
    auto c = cfg;
    c.condition = conds[i / k];
    const auto seed = cfg.seeds[i % k];
    rep.runs[i] = run_condition(c, seed, data[i % k], run_path(o.out_dir, names[i / k], seed));
  });
  for (std::size_t ci = 0; ci < conds.size(); ++ci) {
    ConditionSummary s;
    s.condition = conds[ci];
    for (std::size_t si = 0; si < k; ++si) {
      const auto& r = rep.runs[ci * k + si];
      s.parameter_count = r.parameter_count;
      if (r.aborted) {
        rep.aborted.push_back(names[ci] + "/seed_" + std::to_string(r.seed) + ": " + r.abort_reason);
        continue;
      }
      s.test_accuracy.push_back(r.test.accuracy);
      s.transfer_accuracy.push_back(r.transfer ? r.transfer->accuracy : 0.0);
      s.tension.push_back(r.test.tension);
      s.ns.push_back(r.test.ns);
    }
    rep.conditions.push_back(std::move(s));
  }
  if (rep.aborted.empty()) {
    const auto& u = rep.conditions[0];
    const auto& c = rep.conditions[2];
    rep.transfer_test = paired_one_sided(u.transfer_accuracy, c.transfer_accuracy);
    rep.tension_test = paired_one_sided(u.tension, c.tension);
    rep.gate = rep.transfer_test.p_value < 0.05 ? "PROCEED" : "TERMINATE";
    const double a = mean_of(rep.conditions[0].transfer_accuracy), b = mean_of(rep.conditions[1].transfer_accuracy),
                 d = mean_of(rep.conditions[2].transfer_accuracy);
    rep.ordering_holds = a > b && b > d;
  }
  return rep;
}

Histogram density_histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw ParameterError("histogram of an empty sample");
  if (bins < 1) throw ParameterError("histogram needs at least one bin");
  Histogram h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.low = *lo;
  h.width = *hi > *lo ? (*hi - *lo) / static_cast<double>(bins) : 1.0;
  h.density.assign(bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.low) / h.width);
    h.density[std::min(b, bins - 1)] += 1.0;
  }
  for (auto& d : h.density) d /= static_cast<double>(values.size()) * h.width;
  return h;
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : entries)
    es.push_back({{"alpha", e.alpha},
                  {"runs", e.runs},
                  {"aborted", e.aborted},
                  {"ns_mean", e.ns_mean},
                  {"ns_sd", e.ns_sd},
                  {"tau", e.tension},
                  {"accuracy", e.accuracy},
                  {"ns_histogram", {{"low", e.histogram.low}, {"width", e.histogram.width}, {"density", e.histogram.density}}}});
  return {{"entries", es},
          {"thresholds", stats::to_json(thresholds)},
          {"label", label},
          {"c_proxy", opt(c_proxy)},
          {"meets_design", meets_design},
          {"ns_tau_pairs", ns_tension},
          {"tau_smoothing_window", smoothing}};
}

SweepReport alpha_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas, const SweepOptions& o) {
  validate(cfg);
  if (alphas.empty()) throw SweepInsufficientError("no alpha values given");
  for (double a : alphas)
    if (!(a >= 0.0)) throw ParameterError("alpha values must be non-negative");
  SweepReport rep;
  {
    std::vector<double> pos;
    for (double a : alphas)
      if (a > 0.0) pos.push_back(a);
    const bool decades = !pos.empty() && *std::max_element(pos.begin(), pos.end()) >=
                                             100.0 * *std::min_element(pos.begin(), pos.end());
    rep.meets_design = alphas.size() >= 5 && decades;
  }
  const std::size_t k = cfg.seeds.size();
  std::vector<RunData> data(k);
  for (std::size_t s = 0; s < k; ++s) data[s] = make_run_data(cfg, cfg.seeds[s], false);
  std::vector<RunResult> runs(alphas.size() * k);
  parallel_for(runs.size(), o.jobs, [&](std::size_t i) {
    auto c = cfg;
    c.condition = Condition::uoo;
    c.alpha = uoo::AlphaSchedule(alphas[i / k], uoo::DecayMode::constant);
    const auto seed = cfg.seeds[i % k];
    std::filesystem::path dir;
    if (!o.out_dir.empty()) dir = o.out_dir / ("alpha_" + std::to_string(i / k)) / ("seed_" + std::to_string(seed));
    runs[i] = run_condition(c, seed, data[i % k], dir);
  });

  std::vector<double> pooled_ns, pair_ns, pair_tension;
  std::size_t successful = 0;
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    SweepEntry e;
    e.alpha = alphas[ai];
    std::vector<double> tau, acc;
    for (std::size_t si = 0; si < k; ++si) {
      const auto& r = runs[ai * k + si];
      ++e.runs;
      if (r.aborted) {
        ++e.aborted;
        continue;
      }
      e.ns.insert(e.ns.end(), r.test.ns_values.begin(), r.test.ns_values.end());
      tau.push_back(r.test.tension);
      acc.push_back(r.test.accuracy);
      for (const auto& [ns, t] : r.test.batch_ns_tension) {
        pair_ns.push_back(ns);
        pair_tension.push_back(t);
      }
    }
    if (!e.ns.empty()) {
      ++successful;
      e.ns_mean = mean_of(e.ns);
      e.ns_sd = sd_of(e.ns);
      e.tension = mean_of(tau);
      e.accuracy = mean_of(acc);
      e.histogram = density_histogram(e.ns);
      pooled_ns.insert(pooled_ns.end(), e.ns.begin(), e.ns.end());
    }
    rep.entries.push_back(std::move(e));
  }
  if (successful < 3)
    throw SweepInsufficientError("only " + std::to_string(successful) + " alpha values finished; at least 3 are needed");

  stats::ThresholdOptions to;
  to.dip_draws = o.dip_draws;
  to.smoothing = rep.smoothing;
  rep.thresholds = stats::detect_thresholds(pooled_ns, {}, cfg.seeds.front(), to);
  if (pair_ns.size() >= 4) stats::detect_upper_threshold(pair_ns, pair_tension, to, rep.thresholds);
  for (std::size_t i = 0; i < pair_ns.size(); ++i) rep.ns_tension.emplace_back(pair_ns[i], pair_tension[i]);
  rep.label = rep.thresholds.kappa_low ? "phase_transition" : "tuning_parameter";
  rep.c_proxy = rep.thresholds.kappa_high;
  return rep;
}

std::string to_string(StressMode m) {
  switch (m) {
    case StressMode::alpha_decay: return "alpha_decay";
    case StressMode::ood: return "ood";
    case StressMode::over_entangle: return "over_entangle";
  }
  return "?";
}

StressMode stress_mode_from_string(const std::string& s) {
  if (s == "alpha_decay") return StressMode::alpha_decay;
  if (s == "ood") return StressMode::ood;
  if (s == "over_entangle") return StressMode::over_entangle;
  throw ParameterError("unknown stress mode '" + s + "'");
}

nlohmann::json StressReport::to_json() const {
  return {{"mode", to_string(mode)},
          {"checkpoints", checkpoints},
          {"ns", ns},
          {"beta1_persistence", beta1},
          {"tau", tension},
          {"accuracy", accuracy},
          {"baseline", {{"ns", baseline_ns}, {"beta1_persistence", baseline_beta1}, {"accuracy", baseline_accuracy}}},
          {"collapse", collapse},
          {"ns_reduced", ns_reduced},
          {"ns_accuracy_correlation", opt(ns_accuracy_correlation)},
          {"beta1_accuracy_correlation", opt(beta1_accuracy_correlation)}};
}

StressReport stress_test(const RunResult& trained, const RunData& data, StressMode mode, const StressOptions& o) {
  if (!trained.network) throw StateError("stress test needs a trained network");
  if (trained.aborted) throw StateError("stress test on an aborted run");
  const auto& cfg = trained.config;
  if (cfg.condition == Condition::contrastive) throw ParameterError("stress protocols apply to ODE models");
  StressReport rep;
  rep.mode = mode;
  const auto base = evaluate(*trained.network, data.test, cfg, trained.seed);
  rep.baseline_ns = base.ns;
  rep.baseline_beta1 = base.beta1;
  rep.baseline_accuracy = base.accuracy;
  auto push = [&](double at, const Evaluation& e) {
    rep.checkpoints.push_back(at);
    rep.ns.push_back(e.ns);
    rep.beta1.push_back(e.beta1);
    rep.tension.push_back(e.tension);
    rep.accuracy.push_back(e.accuracy);
  };

  if (mode == StressMode::ood) {
    for (double s : o.shifts) {
      if (s == 0.0) {
        push(0.0, evaluate(*trained.network, data.test, cfg, trained.seed));
      } else {
        push(s, evaluate(*trained.network, synth::ood_variant(data.test, s), cfg, trained.seed));
      }
    }
  } else {
    std::shared_ptr<Network> copy = build_network(cfg, trained.seed);
    copy->load_from(*trained.network);
    push(0.0, base);
    TrainOptions t;
    t.first_step = trained.steps;
    auto c = cfg;
    c.condition = Condition::uoo;
    c.patience = std::numeric_limits<int>::max() / 2;
    if (mode == StressMode::alpha_decay) {
      t.schedule = uoo::AlphaSchedule(cfg.alpha.alpha0(), uoo::DecayMode::linear, 0.0);
      t.epochs = o.decay_epochs;
    } else {
      // No guard band: constant alpha whatever NS does.
      t.schedule = uoo::AlphaSchedule(cfg.alpha.alpha0(), uoo::DecayMode::constant, 0.0);
      t.lambda = cfg.lambda * o.lambda_factor;
      t.epochs = o.over_epochs;
    }
    t.on_epoch = [&](int epoch) { push(epoch + 1.0, evaluate(*copy, data.test, c, trained.seed)); };
    train_network(copy, c, trained.seed, data, t);
  }
  rep.collapse = rep.beta1.back() < 0.5 * rep.beta1.front();
  rep.ns_reduced = rep.ns.back() < rep.baseline_ns;
  if (rep.checkpoints.size() >= 3) {
    rep.ns_accuracy_correlation = safe_pearson(rep.ns, rep.accuracy);
    rep.beta1_accuracy_correlation = safe_pearson(rep.beta1, rep.accuracy);
  }
  return rep;
}

nlohmann::json Falsification::to_json() const {
  return {{"tost", stats::to_json(tost)}, {"falsified", falsified}, {"underpowered", underpowered}};
}

Falsification tost_falsification(std::span<const double> a, std::span<const double> b) {
  Falsification f;
  f.tost = stats::tost(a, b, 0.2, 0.05);
  f.falsified = f.tost.equivalent;
  f.underpowered = std::min(a.size(), b.size()) < f.tost.n_required;
  return f;
}

TrajectoryCloud trajectory_to_cloud(const std::vector<ad::Tensor>& trajectory, std::size_t components) {
  if (trajectory.empty()) throw ParameterError("empty trajectory");
  const std::size_t dim = trajectory.front().rank() == 2 ? trajectory.front().cols() : trajectory.front().size();
  std::size_t rows = 0;
  for (const auto& t : trajectory) {
    if (t.size() % dim != 0) throw DimensionError("trajectory states disagree in width");
    rows += t.size() / dim;
  }
  if (rows < 4) throw ParameterError("trajectory cloud needs at least 4 states");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  Eigen::Index r = 0;
  for (const auto& t : trajectory)
    for (std::size_t i = 0; i < t.size() / dim; ++i, ++r)
      for (std::size_t j = 0; j < dim; ++j) m(r, static_cast<Eigen::Index>(j)) = t.data()[i * dim + j];
  const Eigen::RowVectorXd centre = m.colwise().mean();
  m.rowwise() -= centre;
  const Eigen::MatrixXd cov = m.transpose() * m / static_cast<double>(rows);
  const double total = cov.trace();
  if (!(total > 1e-300)) throw DegenerateError("trajectory has zero variance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const std::size_t k = std::min({components, dim, rows});
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  double kept = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index src = static_cast<Eigen::Index>(dim - 1 - c);  // eigenvalues ascend
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(static_cast<Eigen::Index>(c)) = v;
    kept += std::max(0.0, eig.eigenvalues()(src));
  }
  const Eigen::MatrixXd proj = m * basis;
  std::vector<double> coords(rows * k);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < k; ++c) coords[i * k + c] = proj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
  TrajectoryCloud out;
  out.cloud = ph::PointCloud(rows, k, std::move(coords));
  out.explained_variance = kept / total;
  out.components = k;
  return out;
}

}  // namespace overlap::harness
