#include "overlap/harness/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "overlap/autodiff/ops.hpp"
#include "overlap/autodiff/optim.hpp"
#include "overlap/error.hpp"
#include "overlap/hash.hpp"
#include "overlap/ph/io.hpp"
#include "overlap/uoo/checkpoint.hpp"
#include "overlap/uoo/topo.hpp"

namespace overlap::harness {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

struct Batch {
  ad::Tensor x, y;
  std::vector<double> labels;
};

Batch gather(const synth::Dataset& ds, const std::vector<std::size_t>& rows) {
  const std::size_t d = synth::kFeatureDim;
  std::vector<double> x, y;
  Batch b;
  x.reserve(rows.size() * d);
  y.reserve(rows.size() * d);
  for (std::size_t r : rows) {
    x.insert(x.end(), ds.x.begin() + static_cast<std::ptrdiff_t>(r * d), ds.x.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
    y.insert(y.end(), ds.y.begin() + static_cast<std::ptrdiff_t>(r * d), ds.y.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
    b.labels.push_back(ds.labels[r]);
  }
  b.x = ad::Tensor::constant({rows.size(), d}, std::move(x));
  b.y = ad::Tensor::constant({rows.size(), d}, std::move(y));
  return b;
}

uoo::TopoOptions topo_options(const ExperimentConfig& cfg, double lambda) {
  uoo::TopoOptions o;
  o.lambda = lambda;
  o.eps_min = cfg.eps_min;
  o.max_dim = cfg.max_dim;
  return o;
}

// Rips diagram of a representation block, no gradient bookkeeping.
ph::PersistenceDiagram representation_diagram(std::span<const double> rows, std::size_t dim) {
  ph::PointCloud pc(rows.size() / dim, dim, std::vector<double>(rows.begin(), rows.end()));
  return ph::compute_persistence(ph::rips_filtration(pc, 1));
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Held-out BCE only; cheap enough to run every epoch.
double heldout_loss(const Network& net, const synth::Dataset& ds, std::size_t batch) {
  double total = 0.0;
  for (std::size_t start = 0; start < ds.n; start += batch) {
    std::vector<std::size_t> rows;
    for (std::size_t r = start; r < std::min(ds.n, start + batch); ++r) rows.push_back(r);
    const auto b = gather(ds, rows);
    const auto fw = net.forward(b.x, b.y);
    total += ad::bce_with_logits(fw.logits, b.labels).item() * static_cast<double>(rows.size());
  }
  return total / static_cast<double>(std::max<std::size_t>(1, ds.n));
}

std::string rows_csv(std::span<const double> v, std::size_t dim) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += num(v[i]);
    out += (i + 1) % dim == 0 ? '\n' : ',';
  }
  return out;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
  if (!out) throw ParameterError("could not write " + p.string());
}

}  // namespace

void MetricsLog::append(MetricsRow row) { rows_.push_back(std::move(row)); }

std::string MetricsLog::to_csv() const {
  std::ostringstream os;
  os << "epoch,step,task_loss,topo_loss,total_loss,alpha,tau,ns,beta1_persistence,topo_grad_norm,grad_norm,flags\n";
  for (const auto& r : rows_)
    os << r.epoch << ',' << r.step << ',' << num(r.task_loss) << ',' << num(r.topo_loss) << ',' << num(r.total_loss)
       << ',' << num(r.alpha) << ',' << num(r.tension) << ',' << num(r.ns) << ',' << num(r.beta1) << ','
       << num(r.topo_grad_norm) << ',' << num(r.grad_norm) << ',' << r.flags << '\n';
  return os.str();
}

nlohmann::json MetricsLog::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rows_)
    rows.push_back({{"epoch", r.epoch}, {"step", r.step}, {"task_loss", r.task_loss}, {"topo_loss", r.topo_loss},
                    {"total_loss", r.total_loss}, {"alpha", r.alpha}, {"tau", r.tension}, {"ns", r.ns},
                    {"beta1_persistence", r.beta1}, {"topo_grad_norm", r.topo_grad_norm},
                    {"grad_norm", r.grad_norm}, {"flags", r.flags}});
  return rows;
}

RunData make_run_data(const ExperimentConfig& cfg, std::uint64_t seed, bool with_transfer) {
  RunData d;
  std::string family = cfg.family;
  std::string novel;
  if (with_transfer) std::tie(family, novel) = synth::transfer_pair(seed);
  const auto all = synth::generate(family, cfg.n, seed, cfg.entanglement);
  const auto split = synth::split_rows(cfg.n, seed);
  d.train = synth::slice(all, split.train);
  d.test = synth::slice(all, split.test);
  if (with_transfer) d.transfer = synth::generate(novel, cfg.transfer_n, mix_seed(seed, 7), cfg.entanglement);
  return d;
}

uoo::NsProjection ns_projection(const ExperimentConfig& cfg, std::size_t representation_dim, std::uint64_t seed) {
  return uoo::NsProjection(representation_dim, cfg.model.d1, cfg.model.d2, mix_seed(seed, 77));
}

Evaluation evaluate(const Network& net, const synth::Dataset& ds, const ExperimentConfig& cfg, std::uint64_t seed) {
  Evaluation e;
  const std::size_t dim = net.representation_dim();
  e.representation_dim = dim;
  const auto proj = ns_projection(cfg, dim, seed);
  std::size_t hit = 0;
  double loss = 0.0;
  for (std::size_t start = 0; start < ds.n; start += cfg.batch_size) {
    std::vector<std::size_t> rows;
    for (std::size_t r = start; r < std::min(ds.n, start + cfg.batch_size); ++r) rows.push_back(r);
    const auto b = gather(ds, rows);
    const auto fw = net.forward(b.x, b.y);
    loss += ad::bce_with_logits(fw.logits, b.labels).item() * static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) hit += ((fw.logits.data()[i] > 0.0) == (b.labels[i] > 0.5)) ? 1 : 0;
    const auto rep = fw.representation.data();
    const auto ns = proj.batch(rep, dim);
    e.ns_values.insert(e.ns_values.end(), ns.begin(), ns.end());
    if (rows.size() == cfg.batch_size) {
      const auto pd = representation_diagram(rep, dim);
      const double tau = uoo::structural_tension(pd);
      e.batch_ns_tension.emplace_back(mean_of(ns), tau);
      if (start == 0) {
        e.tension = tau;
        e.beta1 = uoo::total_persistence(pd, 1);
      }
    }
    if (start == 0) e.representations.assign(rep.begin(), rep.end());
  }
  if (ds.n < cfg.batch_size && ds.n >= 4) {
    const auto pd = representation_diagram(e.representations, dim);
    e.tension = uoo::structural_tension(pd);
    e.beta1 = uoo::total_persistence(pd, 1);
  }
  e.accuracy = static_cast<double>(hit) / static_cast<double>(std::max<std::size_t>(1, ds.n));
  e.loss = loss / static_cast<double>(std::max<std::size_t>(1, ds.n));
  e.ns = mean_of(e.ns_values);
  return e;
}

nlohmann::json RunResult::to_json() const {
  auto eval_json = [](const Evaluation& e) {
    return nlohmann::json{{"accuracy", e.accuracy}, {"loss", e.loss}, {"ns", e.ns}, {"tau", e.tension},
                          {"beta1_persistence", e.beta1}};
  };
  nlohmann::json j{{"condition", harness::to_string(config.condition)},
                   {"seed", seed},
                   {"config_hash", config_hash(config)},
                   {"parameter_count", parameter_count},
                   {"epochs_run", epochs_run},
                   {"steps", steps},
                   {"early_stopped", early_stopped},
                   {"aborted", aborted},
                   {"abort_reason", abort_reason},
                   {"health", health},
                   {"log_rows", log.rows().size()}};
  if (!aborted) {
    j["test"] = eval_json(test);
    if (transfer) j["transfer"] = eval_json(*transfer);
  }
  return j;
}

RunResult train_network(std::shared_ptr<Network> net, const ExperimentConfig& cfg, std::uint64_t seed,
                        const RunData& data, const TrainOptions& o) {
  RunResult res;
  res.config = cfg;
  res.seed = seed;
  res.network = net;
  res.parameter_count = net->parameter_count();
  const int epochs = o.epochs.value_or(cfg.epochs);
  auto schedule = o.schedule.value_or(cfg.alpha);
  const double lambda = o.lambda.value_or(cfg.lambda);
  const bool topo_condition = cfg.condition == Condition::uoo;
  const auto topts = topo_options(cfg, lambda);
  const auto proj = ns_projection(cfg, net->representation_dim(), seed);
  const auto params = net->parameters();
  ad::Adam opt(params, {.learning_rate = cfg.learning_rate});
  uoo::GradientHealth health;
  std::mt19937_64 rng(mix_seed(seed, 11));
  double remediation_scale = 1.0;
  std::optional<std::size_t> last_remediation;
  double best = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  std::size_t step = o.first_step;
  if (!o.run_dir.empty()) {
    std::filesystem::create_directories(o.run_dir / "diagrams");
    std::filesystem::create_directories(o.run_dir / "clouds");
  }

  const std::size_t n = data.train.n;
  const std::size_t batch = std::min(cfg.batch_size, n);
  if (batch < 4) throw ParameterError("training needs at least 4 rows per batch");
  std::vector<std::size_t> order(n);
  try {
    for (int epoch = 0; epoch < epochs && !res.aborted; ++epoch) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start + batch <= n; start += batch, ++step) {
        const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                            order.begin() + static_cast<std::ptrdiff_t>(start + batch));
        const auto b = gather(data.train, rows);
        const double alpha = topo_condition ? schedule.at(epoch, epochs) * remediation_scale : 0.0;
        const bool log_now = step % cfg.log_every == 0;
        std::string flags;
        auto flag = [&](const char* f) {
          if (!flags.empty()) flags += '|';
          flags += f;
        };

        opt.zero_grad();
        ad::Tape tape;
        const auto fw = net->forward(b.x, b.y);
        const auto task = ad::bce_with_logits(fw.logits, b.labels);
        const auto objective =
            fw.alignment.defined() ? ad::add(task, ad::scale(fw.alignment, cfg.contrastive_weight)) : task;
        std::optional<uoo::TopoResult> topo;
        if (alpha > 0.0) topo = uoo::topo_loss(fw.representation, topts);
        const auto total = uoo::total_loss(objective, topo ? topo->loss : ad::Tensor(), alpha);
        const double value = total.item();
        if (!std::isfinite(value) || std::abs(value) > 1e6) {
          res.aborted = true;
          res.abort_reason = "divergence at step " + std::to_string(step) + " (loss " + num(value) + ")";
          break;
        }
        tape.backward(total);
        const double gnorm = ad::grad_norm(params);
        opt.step();

        double topo_norm = 0.0;
        if (topo) {
          double s = 0.0;
          for (double g : topo->gradient) s += g * g;
          topo_norm = std::sqrt(s);
          const auto& hs = health.record(topo_norm);
          if (hs.flagged) flag("spike");
          if (hs.remediate && (!last_remediation || step - *last_remediation >= 100)) {
            remediation_scale *= 0.5;
            last_remediation = step;
            flag("remediate");
          }
        }
        if (log_now) {
          const auto rep = fw.representation.data();
          if (!topo) topo = uoo::topo_loss(fw.representation.detach(), topts);
          MetricsRow row;
          row.epoch = epoch;
          row.step = step;
          row.task_loss = task.item();
          row.topo_loss = topo->loss.item();
          row.total_loss = value;
          row.alpha = alpha;
          row.tension = uoo::structural_tension(topo->diagram);
          row.ns = mean_of(proj.batch(rep, net->representation_dim()));
          row.beta1 = uoo::total_persistence(topo->diagram, 1);
          row.topo_grad_norm = topo_norm;
          row.grad_norm = gnorm;
          if (schedule.observe_ns(row.ns)) flag("alpha_step");
          row.flags = flags;
          if (!o.run_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof(name), "step_%07zu.csv", step);
            write_text(o.run_dir / "diagrams" / name, ph::to_csv(topo->diagram));
            write_text(o.run_dir / "clouds" / name, rows_csv(rep, net->representation_dim()));
          }
          res.log.append(std::move(row));
        }
      }
      if (res.aborted) break;
      res.epochs_run = epoch + 1;
      const double held = heldout_loss(*net, data.test, cfg.batch_size);
      if (!std::isfinite(held)) {
        res.aborted = true;
        res.abort_reason = "non-finite held-out loss after epoch " + std::to_string(epoch);
        break;
      }
      if (held < best) {
        best = held;
        best_epoch = epoch;
      } else if (epoch - best_epoch >= cfg.patience) {
        res.early_stopped = true;
        if (o.on_epoch) o.on_epoch(epoch);
        break;
      }
      if (o.on_epoch) o.on_epoch(epoch);
    }
  } catch (const StiffnessError& e) {
    res.aborted = true;
    res.abort_reason = std::string("stiffness: ") + e.what();
  }
  res.steps = step - o.first_step;
  res.health = health.summary();
  if (!res.aborted) {
    res.test = evaluate(*net, data.test, cfg, seed);
    if (data.transfer) res.transfer = evaluate(*net, *data.transfer, cfg, seed);
  }
  return res;
}

RunResult run_condition(const ExperimentConfig& cfg, std::uint64_t seed, const RunData& data,
                        const std::filesystem::path& run_dir) {
  validate(cfg);
  std::shared_ptr<Network> net = build_network(cfg, seed);
  if (!run_dir.empty()) {
    std::filesystem::create_directories(run_dir);
    nlohmann::json c{{"config", to_json(cfg)}, {"seed", seed}, {"config_hash", config_hash(cfg)}};
    write_text(run_dir / "config.json", canonical_dump(c) + "\n");
  }
  TrainOptions o;
  o.run_dir = run_dir;
  auto res = train_network(net, cfg, seed, data, o);
  if (!run_dir.empty()) {
    write_text(run_dir / "metrics.csv", res.log.to_csv());
    if (!res.aborted) {
      write_text(run_dir / "representations.csv", rows_csv(res.test.representations, res.test.representation_dim));
      uoo::save_checkpoint(run_dir / "model", net->parameters(),
                           {{"condition", to_string(cfg.condition)}, {"seed", seed}, {"config_hash", config_hash(cfg)}});
    }
    write_text(run_dir / "report.json", canonical_dump(res.to_json()) + "\n");
  }
  return res;
}

}  // namespace overlap::harness
