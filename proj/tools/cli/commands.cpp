#include "commands.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "manifest.hpp"
#include "overlap/error.hpp"
#include "overlap/harness/protocols.hpp"
#include "overlap/ph/bottleneck.hpp"
#include "overlap/ph/filtration.hpp"
#include "overlap/ph/io.hpp"
#include "overlap/stats/changepoint.hpp"
#include "overlap/stats/density.hpp"
#include "overlap/stats/dip.hpp"
#include "overlap/stats/equivalence.hpp"
#include "overlap/synth/probes.hpp"
#include "overlap/uoo/metrics.hpp"
#include "svg.hpp"

namespace overlap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- small helpers ----

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw ParameterError("could not write " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParameterError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("OVERLAP_LAB_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError(std::string("OVERLAP_LAB_SEED is not an unsigned integer: ") + s);
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  return env_seed().value_or(0);
}

// First column of a CSV as numbers; a non-numeric first line is a header.
std::vector<double> read_column(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::vector<double> v;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cell = line.substr(0, line.find(','));
    try {
      std::size_t used = 0;
      const double x = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      v.push_back(x);
    } catch (const std::exception&) {
      if (!first) throw ParameterError(p.string() + ": not a number: '" + cell + "'");
    }
    first = false;
  }
  return v;
}

ph::PointCloud read_cloud(const fs::path& p) {
  std::istringstream in(read_text(p));
  return ph::cloud_from_csv(in);
}

ph::PersistenceDiagram read_diagram(const fs::path& p) {
  std::istringstream in(read_text(p));
  return ph::diagram_from_csv(in);
}

// Config file, then flags. A missing "seeds" key falls back to the environment.
harness::ExperimentConfig load_config(const std::string& path, const std::vector<std::uint64_t>& seeds) {
  json j = json::object();
  if (!path.empty()) {
    try {
      j = json::parse(read_text(path));
    } catch (const json::exception& e) {
      throw ParameterError(path + ": " + e.what());
    }
  }
  auto cfg = harness::config_from_json(j);
  if (!seeds.empty()) {
    cfg.seeds = seeds;
  } else if (!j.contains("seeds")) {
    if (auto s = env_seed()) cfg.seeds = {*s};
  }
  harness::validate(cfg);
  return cfg;
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << pretty(j);
  } else {
    write_text(out_path, pretty(j));
  }
}

// ---- option bundles ----

struct Common {
  bool canonical = false;
  std::size_t jobs = 1;
};

struct GenArgs {
  std::string family = "xor64";
  std::size_t n = 1000;
  std::optional<std::uint64_t> seed;
  double entanglement = 0.0;
  std::string out = "dataset";
  bool csv = false, ceiling = false;
};

struct RunArgs {
  std::string config, out;
  std::vector<std::uint64_t> seeds;
  bool dry_run = false, placebo = false, plot = false;
};

struct SweepArgs {
  std::string config, out = "sweep_out";
  std::vector<std::uint64_t> seeds;
  std::vector<double> alphas;
  std::size_t dip_draws = 2000;
  bool plot = false;
};

struct StressArgs {
  std::string config, out = "stress_out", mode = "all";
  std::optional<std::uint64_t> seed;
  int decay_epochs = 50, over_epochs = 10;
  double lambda_factor = 10.0;
  std::vector<double> shifts{0, 1, 2, 5};
  bool plot = false;
};

struct StatsArgs {
  std::string file, file_b, out;
  std::optional<std::uint64_t> seed;
  std::size_t draws = 10000;
  std::optional<double> penalty;
  double delta = 0.2, alpha = 0.05;
  double pb = 0, pc = 0, pd = 0;
};

struct TopoArgs {
  std::string a, b, out, plot;
  int max_dim = 1, dim = 1;
  bool diagrams = false;
};

// ---- commands ----

int cmd_gen(const GenArgs& a, const Common& c, const std::vector<std::string>& argv, std::ostream& out) {
  if (!synth::known_family(a.family)) throw ParameterError("unknown family '" + a.family + "'");
  const auto seed = resolve_seed(a.seed);
  const fs::path stem(a.out);
  RunManifest m;
  m.command = "gen";
  m.arguments = argv;
  m.seed = seed;
  m.config_hash = harness::config_hash([&] {
    harness::ExperimentConfig k;
    k.family = a.family;
    k.n = a.n;
    k.entanglement = a.entanglement;
    k.seeds = {seed};
    return k;
  }());
  ManifestWriter mw(stem.string() + ".manifest.json", m, c.canonical);
  const auto ds = synth::generate(a.family, a.n, seed, a.entanglement);
  synth::save_binary(ds, stem);
  std::vector<std::string> files{stem.filename().string() + ".bin", stem.filename().string() + ".json"};
  if (a.csv) {
    write_text(stem.string() + ".csv", synth::to_csv(ds));
    files.push_back(stem.filename().string() + ".csv");
  }
  out << pretty(synth::header(ds));
  if (a.ceiling) out << "separable_ceiling=" << synth::separable_ceiling(ds, seed) << '\n';
  mw.finish("complete", files);
  return kExitOk;
}

int cmd_poc(const RunArgs& a, const Common& c, const std::vector<std::string>& argv, std::ostream& out) {
  const auto cfg = load_config(a.config, a.seeds);
  if (a.dry_run) {
    json j{{"config", harness::to_json(cfg)}, {"config_hash", harness::config_hash(cfg)}, {"capacity", json::object()}};
    for (const auto& [cond, count] : harness::capacity(cfg)) j["capacity"][harness::to_string(cond)] = count;
    out << pretty(j);
    return kExitOk;
  }
  const fs::path dir = a.out.empty() ? fs::path("poc_out") : fs::path(a.out);
  RunManifest m;
  m.command = "poc";
  m.arguments = argv;
  m.seed = cfg.seeds.front();
  m.config_hash = harness::config_hash(cfg);
  ManifestWriter mw(dir / "manifest.json", m, c.canonical);
  harness::PocOptions po;
  po.out_dir = dir;
  po.jobs = c.jobs;
  po.placebo = a.placebo;
  const auto rep = harness::run_poc(cfg, po);
  write_text(dir / "report.json", pretty(rep.to_json()));
  for (const auto& s : rep.conditions) {
    const auto j = s.to_json();
    out << harness::to_string(s.condition) << ": params=" << s.parameter_count
        << " transfer=" << j["transfer_accuracy"]["mean"].get<double>() << " +- "
        << j["transfer_accuracy"]["sd"].get<double>() << " tau=" << j["tau"]["mean"].get<double>()
        << " ns=" << j["ns"]["mean"].get<double>() << '\n';
  }
  if (rep.underpowered) out << "note: fewer than 3 seeds, the gate is underpowered\n";
  out << "ordering uoo > ode_ablation > contrastive: " << (rep.ordering_holds ? "holds" : "does not hold") << '\n';
  if (!rep.gate) {
    for (const auto& r : rep.aborted) out << "aborted: " << r << '\n';
    mw.finish("aborted", dir);
    out << "GATE=WITHHELD\n";
    return kExitAborted;
  }
  mw.finish("complete", dir);
  out << "GATE=" << *rep.gate << '\n';
  return kExitOk;
}

int cmd_sweep(const SweepArgs& a, const Common& c, const std::vector<std::string>& argv, std::ostream& out) {
  const auto cfg = load_config(a.config, a.seeds);
  const fs::path dir(a.out);
  RunManifest m;
  m.command = "sweep";
  m.arguments = argv;
  m.seed = cfg.seeds.front();
  m.config_hash = harness::config_hash(cfg);
  ManifestWriter mw(dir / "manifest.json", m, c.canonical);
  harness::SweepOptions so;
  so.out_dir = dir / "runs";
  so.jobs = c.jobs;
  so.dip_draws = a.dip_draws;
  harness::SweepReport rep;
  try {
    rep = harness::alpha_sweep(cfg, a.alphas, so);
  } catch (const SweepInsufficientError&) {
    mw.finish("aborted", dir);
    throw;
  }
  write_text(dir / "sweep.json", pretty(rep.to_json()));
  if (a.plot) {
    std::vector<double> pooled;
    for (const auto& e : rep.entries) pooled.insert(pooled.end(), e.ns.begin(), e.ns.end());
    write_text(dir / "ns_histogram.svg",
               histogram_svg(harness::density_histogram(pooled, 30), rep.thresholds.kappa_low,
                             "NS over all alpha values", "NS"));
    std::vector<double> x, y;
    for (const auto& [ns, t] : rep.ns_tension) x.push_back(ns), y.push_back(t);
    write_text(dir / "tau_vs_ns.svg", scatter_svg(x, y, rep.thresholds.kappa_high, "tau against NS", "NS", "tau"));
  }
  if (!rep.meets_design) out << "note: fewer than 5 alpha values or under two decades of range\n";
  out << "label=" << rep.label << '\n';
  mw.finish("complete", dir);
  return kExitOk;
}

int cmd_stress(const StressArgs& a, const Common& c, const std::vector<std::string>& argv, std::ostream& out) {
  std::vector<std::uint64_t> seeds;
  if (a.seed) seeds = {*a.seed};
  auto cfg = load_config(a.config, seeds);
  cfg.condition = harness::Condition::uoo;
  const auto seed = cfg.seeds.front();
  std::vector<harness::StressMode> modes;
  if (a.mode == "all") {
    modes = {harness::StressMode::alpha_decay, harness::StressMode::ood, harness::StressMode::over_entangle};
  } else {
    modes = {harness::stress_mode_from_string(a.mode)};
  }
  const fs::path dir(a.out);
  RunManifest m;
  m.command = "stress";
  m.arguments = argv;
  m.seed = seed;
  m.config_hash = harness::config_hash(cfg);
  ManifestWriter mw(dir / "manifest.json", m, c.canonical);
  const auto data = harness::make_run_data(cfg, seed, false);
  const auto trained = harness::run_condition(cfg, seed, data, dir / "base");
  if (trained.aborted) {
    out << "aborted: " << trained.abort_reason << '\n';
    mw.finish("aborted", dir);
    return kExitAborted;
  }
  harness::StressOptions so;
  so.decay_epochs = a.decay_epochs;
  so.over_epochs = a.over_epochs;
  so.lambda_factor = a.lambda_factor;
  so.shifts = a.shifts;
  json all = json::object();
  for (auto mode : modes) {
    const auto rep = harness::stress_test(trained, data, mode, so);
    const auto name = harness::to_string(mode);
    all[name] = rep.to_json();
    out << name << ": collapse=" << (rep.collapse ? "true" : "false")
        << " ns_reduced=" << (rep.ns_reduced ? "true" : "false") << '\n';
    if (a.plot) {
      const std::string xl = mode == harness::StressMode::ood ? "shift" : "epoch";
      write_text(dir / ("stress_" + name + "_ns.svg"), scatter_svg(rep.checkpoints, rep.ns, std::nullopt,
                                                                    name + ": NS", xl, "NS"));
      write_text(dir / ("stress_" + name + "_beta1.svg"),
                 scatter_svg(rep.checkpoints, rep.beta1, std::nullopt, name + ": H1 total persistence", xl, "beta1"));
      write_text(dir / ("stress_" + name + "_accuracy.svg"),
                 scatter_svg(rep.checkpoints, rep.accuracy, std::nullopt, name + ": accuracy", xl, "accuracy"));
    }
  }
  write_text(dir / "stress.json", pretty(all));
  mw.finish("complete", dir);
  return kExitOk;
}

int cmd_stats(const std::string& which, const StatsArgs& a, std::ostream& out) {
  json j;
  if (which == "dip") {
    const auto x = read_column(a.file);
    const auto r = stats::dip_test(x, resolve_seed(a.seed), a.draws);
    j = {{"n", x.size()}, {"dip", r.statistic}, {"p_value", r.p_value}, {"draws", r.draws},
         {"modal_interval", {r.modal_low, r.modal_high}}};
  } else if (which == "gmm") {
    const auto x = read_column(a.file);
    const auto r = stats::gmm2_bic(x, resolve_seed(a.seed));
    auto comp = [](const stats::MixtureFit& f) {
      json arr = json::array();
      for (const auto& g : f.components)
        arr.push_back({{"weight", g.weight}, {"mean", g.mean}, {"variance", g.variance}});
      return arr;
    };
    j = {{"n", x.size()},
         {"bic_1", r.bic1},
         {"bic_2", r.bic2},
         {"selected_components", r.bic2 < r.bic1 ? 2 : 1},
         {"one", comp(r.one)},
         {"two", comp(r.two)},
         {"crossover", r.crossover ? json(*r.crossover) : json(nullptr)}};
  } else if (which == "pelt") {
    const auto x = read_column(a.file);
    stats::PeltOptions po;
    po.penalty = a.penalty;
    const auto cps = stats::pelt(x, po);
    j = {{"n", x.size()}, {"penalty", a.penalty ? *a.penalty : stats::default_penalty(x)}, {"changepoints", cps}};
  } else if (which == "tost") {
    const auto x = read_column(a.file), y = read_column(a.file_b);
    j = stats::to_json(stats::tost(x, y, a.delta, a.alpha));
  } else if (which == "etr") {
    j = {{"p_b", a.pb}, {"p_c", a.pc}, {"p_d", a.pd}, {"etr", stats::etr(a.pb, a.pc, a.pd)}};
  }
  emit(j, a.out, out);
  return kExitOk;
}

int cmd_topo(const std::string& which, const TopoArgs& a, std::ostream& out) {
  json j;
  if (which == "persistence") {
    const auto cloud = read_cloud(a.a);
    const auto pd = ph::compute_persistence(ph::rips_filtration(cloud, a.max_dim));
    j = ph::to_json(pd);
    j["points"] = cloud.size();
    j["tau"] = uoo::structural_tension(pd);
    for (int k = 0; k <= a.max_dim; ++k) j["total_persistence"].push_back(uoo::total_persistence(pd, k));
    if (!a.plot.empty()) write_text(a.plot, diagram_svg(pd, "persistence diagram"));
  } else if (which == "bottleneck") {
    const auto pa = read_diagram(a.a), pb = read_diagram(a.b);
    j = {{"dim", a.dim}, {"bottleneck", ph::bottleneck_distance(pa, pb, a.dim)}};
  } else if (which == "tsas") {
    const double v = a.diagrams ? ph::tsas(read_diagram(a.a), read_diagram(a.b)) : ph::tsas(read_cloud(a.a), read_cloud(a.b));
    j = {{"tsas", v}};
  }
  emit(j, a.out, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"overlap-lab: entangled-latent experiments, persistence and statistics", "overlap-lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());
  Common common;
  auto add_common = [&](CLI::App* s, bool jobs) {
    s->add_flag("--canonical", common.canonical, "Leave timestamps out of the run manifest");
    if (jobs)
      s->add_option("--jobs", common.jobs, "Independent (condition, seed) jobs run in parallel")
          ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  };

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic two-modality dataset");
  g->add_option("--family", gen.family, "Task family: xor64 or xor64/<k>")->capture_default_str();
  g->add_option("--n", gen.n, "Number of samples")->check(CLI::Range(std::size_t{20}, std::size_t{100000000}))
      ->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed (default: OVERLAP_LAB_SEED, else 0)");
  g->add_option("--entanglement", gen.entanglement, "Leakage of the interaction bit into single modalities, in [0, 1]")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  g->add_option("--out", gen.out, "Output stem; writes <stem>.bin and <stem>.json")->capture_default_str();
  g->add_flag("--csv", gen.csv, "Also write <stem>.csv");
  g->add_flag("--ceiling", gen.ceiling, "Print the best accuracy of an additive single-modality model");
  add_common(g, false);

  RunArgs poc;
  auto* p = app.add_subcommand("poc", "Train the three conditions and apply the transfer gate");
  p->add_option("--config", poc.config, "Experiment config (JSON); missing keys keep defaults")
      ->check(CLI::ExistingFile);
  p->add_option("--seeds", poc.seeds, "Comma-separated seeds, overriding the config")->delimiter(',');
  p->add_option("--out", poc.out, "Output directory (default poc_out)");
  p->add_flag("--dry-run", poc.dry_run, "Print the resolved config and parameter counts, then exit");
  p->add_flag("--placebo", poc.placebo, "Replace the contrastive condition by a second uoo run");
  add_common(p, true);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Train the uoo condition across alpha values and look for NS thresholds");
  sw->add_option("--config", sweep.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  sw->add_option("--alphas", sweep.alphas, "Comma-separated topology weights")->delimiter(',')->required();
  sw->add_option("--seeds", sweep.seeds, "Comma-separated seeds, overriding the config")->delimiter(',');
  sw->add_option("--out", sweep.out, "Output directory")->capture_default_str();
  sw->add_option("--dip-draws", sweep.dip_draws, "Monte-Carlo draws for the dip p-value")->capture_default_str();
  sw->add_flag("--plot", sweep.plot, "Write ns_histogram.svg and tau_vs_ns.svg");
  add_common(sw, true);

  StressArgs stress;
  auto* st = app.add_subcommand("stress", "Train a uoo model, then probe it under regularisation loss, shift and over-entanglement");
  st->add_option("--config", stress.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  st->add_option("--mode", stress.mode, "alpha_decay, ood, over_entangle or all")->capture_default_str();
  st->add_option("--seed", stress.seed, "Seed, overriding the config");
  st->add_option("--out", stress.out, "Output directory")->capture_default_str();
  st->add_option("--decay-epochs", stress.decay_epochs, "Epochs over which alpha falls linearly to 0")
      ->check(CLI::PositiveNumber)->capture_default_str();
  st->add_option("--over-epochs", stress.over_epochs, "Retraining epochs with the scaled topology term")
      ->check(CLI::PositiveNumber)->capture_default_str();
  st->add_option("--lambda-factor", stress.lambda_factor, "Multiplier on lambda for over-entanglement")
      ->check(CLI::PositiveNumber)->capture_default_str();
  st->add_option("--shifts", stress.shifts, "Comma-separated distribution shifts")->delimiter(',');
  st->add_flag("--plot", stress.plot, "Write NS, H1 persistence and accuracy trajectories as SVG");
  add_common(st, false);

  StatsArgs sa;
  auto* s = app.add_subcommand("stats", "Statistics on CSV columns (first column, optional header)");
  s->require_subcommand(1);
  auto* s_dip = s->add_subcommand("dip", "Hartigan dip test with a Monte-Carlo p-value");
  s_dip->add_option("file", sa.file, "Sample CSV")->required()->check(CLI::ExistingFile);
  s_dip->add_option("--draws", sa.draws, "Uniform reference draws")->capture_default_str();
  s_dip->add_option("--seed", sa.seed, "Seed for the reference draws");
  auto* s_gmm = s->add_subcommand("gmm", "One- against two-component Gaussian mixture by BIC");
  s_gmm->add_option("file", sa.file, "Sample CSV")->required()->check(CLI::ExistingFile);
  s_gmm->add_option("--seed", sa.seed, "Seed for EM restarts");
  auto* s_pelt = s->add_subcommand("pelt", "Mean-shift changepoints by PELT");
  s_pelt->add_option("file", sa.file, "Series CSV")->required()->check(CLI::ExistingFile);
  s_pelt->add_option("--penalty", sa.penalty, "Penalty per changepoint (default 2 ln n times the noise variance)");
  auto* s_tost = s->add_subcommand("tost", "Two one-sided tests of equivalence on Cohen's d");
  s_tost->add_option("a", sa.file, "First sample CSV")->required()->check(CLI::ExistingFile);
  s_tost->add_option("b", sa.file_b, "Second sample CSV")->required()->check(CLI::ExistingFile);
  s_tost->add_option("--delta", sa.delta, "Equivalence margin on d")->capture_default_str();
  s_tost->add_option("--alpha", sa.alpha, "Significance level")->capture_default_str();
  auto* s_etr = s->add_subcommand("etr", "Share of incorrect responses that are content-related but structurally wrong");
  s_etr->add_option("--pb", sa.pb, "Probability of a content-related, structurally wrong response")->required();
  s_etr->add_option("--pc", sa.pc, "Probability of the second kind of incorrect response")->required();
  s_etr->add_option("--pd", sa.pd, "Probability of the third kind of incorrect response")->required();
  for (auto* sub : {s_dip, s_gmm, s_pelt, s_tost, s_etr})
    sub->add_option("--out", sa.out, "Write the JSON here instead of stdout");

  TopoArgs ta;
  auto* t = app.add_subcommand("topo", "Persistent homology on CSV point clouds and diagrams");
  t->require_subcommand(1);
  auto* t_pers = t->add_subcommand("persistence", "Vietoris-Rips persistence of a point cloud");
  t_pers->add_option("cloud", ta.a, "Point cloud CSV, one point per row")->required()->check(CLI::ExistingFile);
  t_pers->add_option("--max-dim", ta.max_dim, "Highest homology dimension")->check(CLI::Range(0, 2))
      ->capture_default_str();
  t_pers->add_option("--plot", ta.plot, "Write the diagram as SVG to this path");
  auto* t_bn = t->add_subcommand("bottleneck", "Bottleneck distance between two diagram CSVs");
  t_bn->add_option("a", ta.a, "Diagram CSV")->required()->check(CLI::ExistingFile);
  t_bn->add_option("b", ta.b, "Diagram CSV")->required()->check(CLI::ExistingFile);
  t_bn->add_option("--dim", ta.dim, "Homology dimension")->capture_default_str();
  auto* t_ts = t->add_subcommand("tsas", "Normalised bottleneck distance between the H1 diagrams of two trajectories (0 = aligned)");
  t_ts->add_option("a", ta.a, "Point cloud CSV (or diagram CSV with --diagrams)")->required()
      ->check(CLI::ExistingFile);
  t_ts->add_option("b", ta.b, "Point cloud CSV (or diagram CSV with --diagrams)")->required()
      ->check(CLI::ExistingFile);
  t_ts->add_flag("--diagrams", ta.diagrams, "Inputs are diagrams rather than clouds");
  for (auto* sub : {t_pers, t_bn, t_ts}) sub->add_option("--out", ta.out, "Write the JSON here instead of stdout");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, common, args, out);
    if (p->parsed()) return cmd_poc(poc, common, args, out);
    if (sw->parsed()) return cmd_sweep(sweep, common, args, out);
    if (st->parsed()) return cmd_stress(stress, common, args, out);
    for (auto* sub : {s_dip, s_gmm, s_pelt, s_tost, s_etr})
      if (sub->parsed()) return cmd_stats(sub->get_name(), sa, out);
    for (auto* sub : {t_pers, t_bn, t_ts})
      if (sub->parsed()) return cmd_topo(sub->get_name(), ta, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "aborted: " << e.what() << '\n';
    return kExitAborted;
  }
  return kExitUsage;
}

}  // namespace overlap::cli
