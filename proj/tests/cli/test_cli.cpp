#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "overlap/harness/config.hpp"

namespace fs = std::filesystem;
using overlap::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("overlap_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string last_line(const std::string& s) {
  auto t = s;
  while (!t.empty() && t.back() == '\n') t.pop_back();
  return t.substr(t.find_last_of('\n') + 1);
}

std::string column(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  os << "value\n";
  for (double x : v) os << x << '\n';
  return os.str();
}

// Small model so PoC-style runs stay quick.
std::string small_config(int epochs) {
  overlap::harness::ExperimentConfig c;
  c.model.latent = 16;
  c.model.hidden = 32;
  auto j = overlap::harness::to_json(c);
  j["n"] = 256;
  j["transfer_n"] = 128;
  j["epochs"] = epochs;
  j["grid_points"] = 5;
  j["log_every"] = 2;
  return j.dump();
}

}  // namespace

TEST_CASE("gen writes files that echo the flags and repeat exactly") {
  const auto dir = scratch("gen");
  const auto a = call({"gen", "--family", "xor64", "--n", "1000", "--seed", "7", "--out", (dir / "a").string()});
  REQUIRE(a.code == 0);
  CHECK(fs::exists(dir / "a.bin"));
  CHECK(fs::exists(dir / "a.json"));
  CHECK(fs::exists(dir / "a.manifest.json"));
  const auto h = nlohmann::json::parse(slurp(dir / "a.json"));
  CHECK(h["family"] == "xor64");
  CHECK(h["n"] == 1000);
  CHECK(h["seed"] == 7);
  REQUIRE(call({"gen", "--family", "xor64", "--n", "1000", "--seed", "7", "--out", (dir / "b").string()}).code == 0);
  CHECK(slurp(dir / "a.bin") == slurp(dir / "b.bin"));
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const auto m = nlohmann::json::parse(slurp(dir / "a.manifest.json"));
  CHECK(m["status"] == "complete");
  CHECK(m["artifacts"].size() == 2);
  CHECK(m.contains("started_at"));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(call({"gen", "--entanglement", "1.5"}).code == 2);
  CHECK(call({"gen", "--family", "graph"}).code == 2);
  CHECK(call({"gen", "--bogus"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"stats", "dip", "/nonexistent/file.csv"}).code == 2);
  CHECK(call({"poc", "--config", "/nonexistent/config.json"}).code == 2);
  const auto dir = scratch("usage");
  put(dir / "bad.json", "{ not json");
  CHECK(call({"poc", "--config", (dir / "bad.json").string(), "--dry-run"}).code == 2);
  put(dir / "unknown.json", R"({"epochz": 3})");
  CHECK(call({"poc", "--config", (dir / "unknown.json").string(), "--dry-run"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("help text documents every subcommand") {
  for (std::vector<std::string> sub : {std::vector<std::string>{"gen"}, {"poc"}, {"sweep"}, {"stress"},
                                       {"stats", "tost"}, {"topo", "persistence"}}) {
    sub.push_back("--help");
    const auto r = call(sub);
    CHECK(r.code == 0);
    CHECK(r.out.find("--") != std::string::npos);
  }
}

TEST_CASE("seed falls back to the environment") {
  const auto dir = scratch("envseed");
  ::setenv("OVERLAP_LAB_SEED", "11", 1);
  REQUIRE(call({"gen", "--n", "100", "--out", (dir / "e").string()}).code == 0);
  ::unsetenv("OVERLAP_LAB_SEED");
  CHECK(nlohmann::json::parse(slurp(dir / "e.json"))["seed"] == 11);
  REQUIRE(call({"gen", "--n", "100", "--out", (dir / "z").string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "z.json"))["seed"] == 0);
  ::setenv("OVERLAP_LAB_SEED", "eleven", 1);
  CHECK(call({"gen", "--n", "100", "--out", (dir / "w").string()}).code == 2);
  ::unsetenv("OVERLAP_LAB_SEED");
}

TEST_CASE("poc dry run prints the resolved config without training") {
  const auto dir = scratch("dry");
  put(dir / "c.json", R"({"epochs": 3})");
  const auto r = call({"poc", "--config", (dir / "c.json").string(), "--seeds", "4,5,6", "--dry-run",
                       "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["epochs"] == 3);
  CHECK(j["config"]["seeds"] == nlohmann::json::array({4, 5, 6}));
  CHECK(j["capacity"].size() == 3);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("poc emits exactly one gate line and byte-identical reports") {
  const auto dir = scratch("poc");
  put(dir / "c.json", small_config(2));
  const auto cfgj = nlohmann::json::parse(small_config(2));
  // Capacity matching applies to whatever budget the config states.
  auto with_budget = cfgj;
  with_budget["param_budget"] = nlohmann::json::parse(
      call({"poc", "--config", (dir / "c.json").string(), "--dry-run"}).out)["capacity"]["uoo"];
  put(dir / "c.json", with_budget.dump());
  const auto a = call({"poc", "--config", (dir / "c.json").string(), "--seeds", "0", "--out",
                       (dir / "a").string(), "--canonical"});
  INFO(a.err);
  REQUIRE(a.code == 0);
  const auto gate = last_line(a.out);
  CHECK((gate == "GATE=PROCEED" || gate == "GATE=TERMINATE"));
  std::size_t count = 0;
  for (std::size_t at = a.out.find("GATE="); at != std::string::npos; at = a.out.find("GATE=", at + 1)) ++count;
  CHECK(count == 1);
  const auto b = call({"poc", "--config", (dir / "c.json").string(), "--seeds", "0", "--out",
                       (dir / "b").string(), "--canonical"});
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(slurp(dir / "a" / "manifest.json").size() > 0);
  for (const char* f : {"config.json", "metrics.csv", "report.json"})
    CHECK(slurp(dir / "a" / "uoo" / "seed_0" / f) == slurp(dir / "b" / "uoo" / "seed_0" / f));
  CHECK(fs::exists(dir / "a" / "uoo" / "seed_0" / "diagrams"));
  const auto m = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK_FALSE(m.contains("started_at"));
  CHECK(m["status"] == "complete");
  bool listed = false;
  for (const auto& f : m["artifacts"]) listed = listed || f == "report.json";
  CHECK(listed);

  // Capacity mismatch is a config problem.
  auto off = with_budget;
  off["param_budget"] = 10 * with_budget["param_budget"].get<int>();
  put(dir / "off.json", off.dump());
  CHECK(call({"poc", "--config", (dir / "off.json").string(), "--seeds", "0", "--out", (dir / "off").string()}).code ==
        2);
}

TEST_CASE("poc with a diverging config withholds the gate") {
  const auto dir = scratch("abort");
  auto j = nlohmann::json::parse(small_config(2));
  j["learning_rate"] = 1e4;
  put(dir / "c.json", j.dump());
  j["param_budget"] = nlohmann::json::parse(
      call({"poc", "--config", (dir / "c.json").string(), "--dry-run"}).out)["capacity"]["uoo"];
  put(dir / "c.json", j.dump());
  const auto r = call({"poc", "--config", (dir / "c.json").string(), "--seeds", "0", "--out", (dir / "o").string()});
  CHECK(r.code == 3);
  CHECK(last_line(r.out) == "GATE=WITHHELD");
  CHECK(nlohmann::json::parse(slurp(dir / "o" / "report.json"))["gate"].is_null());
}

TEST_CASE("sweep over four alphas reports four entries and plots") {
  const auto dir = scratch("sweep");
  put(dir / "c.json", small_config(1));
  const auto r = call({"sweep", "--config", (dir / "c.json").string(), "--alphas", "0,0.01,0.1,1", "--seeds", "0",
                       "--out", (dir / "s").string(), "--plot", "--dip-draws", "200"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "s" / "sweep.json"));
  CHECK(j["entries"].size() == 4);
  CHECK((j["label"] == "phase_transition" || j["label"] == "tuning_parameter"));
  CHECK(slurp(dir / "s" / "ns_histogram.svg").find("<svg") == 0);
  CHECK(slurp(dir / "s" / "tau_vs_ns.svg").find("<svg") == 0);
  CHECK(call({"sweep", "--config", (dir / "c.json").string(), "--alphas", "0,1", "--seeds", "0", "--out",
              (dir / "t").string()})
            .code == 3);
}

TEST_CASE("stress over all modes") {
  const auto dir = scratch("stress");
  put(dir / "c.json", small_config(1));
  const auto r = call({"stress", "--config", (dir / "c.json").string(), "--seed", "0", "--out",
                       (dir / "s").string(), "--decay-epochs", "2", "--over-epochs", "2", "--plot"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "s" / "stress.json"));
  for (const char* m : {"alpha_decay", "ood", "over_entangle"}) {
    REQUIRE(j.contains(m));
    CHECK(j[m]["ns"].size() == j[m]["accuracy"].size());
    CHECK(j[m]["beta1_persistence"].size() == j[m]["accuracy"].size());
  }
  CHECK(fs::exists(dir / "s" / "stress_ood_ns.svg"));
  CHECK(call({"stress", "--config", (dir / "c.json").string(), "--mode", "melt", "--out", (dir / "m").string()})
            .code == 2);
}

TEST_CASE("stats subcommands") {
  const auto dir = scratch("stats");
  std::vector<double> a, flat(30, 2.5), bimodal;
  for (int i = 0; i < 200; ++i) a.push_back(std::sin(0.37 * i) + 0.01 * i);
  for (int i = 0; i < 100; ++i) bimodal.push_back((i % 2 ? 4.0 : 0.0) + 0.5 * std::sin(1.7 * i));
  put(dir / "a.csv", column(a));
  put(dir / "flat.csv", column(flat));
  put(dir / "bi.csv", column(bimodal));

  auto tost = call({"stats", "tost", "--delta", "0.2", (dir / "a.csv").string(), (dir / "a.csv").string()});
  REQUIRE(tost.code == 0);
  CHECK(nlohmann::json::parse(tost.out)["equivalent"] == true);

  auto pelt = call({"stats", "pelt", (dir / "flat.csv").string()});
  REQUIRE(pelt.code == 0);
  CHECK(nlohmann::json::parse(pelt.out)["changepoints"].empty());

  auto gmm = call({"stats", "gmm", (dir / "bi.csv").string(), "--seed", "1"});
  REQUIRE(gmm.code == 0);
  CHECK(nlohmann::json::parse(gmm.out)["selected_components"] == 2);

  auto dip = call({"stats", "dip", (dir / "bi.csv").string(), "--draws", "500", "--out", (dir / "dip.json").string()});
  REQUIRE(dip.code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "dip.json"))["p_value"].get<double>() < 0.05);

  auto etr = call({"stats", "etr", "--pb", "0.8", "--pc", "0.6", "--pd", "0.5"});
  REQUIRE(etr.code == 0);
  CHECK(nlohmann::json::parse(etr.out)["etr"].get<double>() == doctest::Approx(0.8 / 1.9));
  CHECK(call({"stats", "etr", "--pb", "0", "--pc", "0", "--pd", "0"}).code == 3);
  // Identical flags, identical bytes.
  CHECK(call({"stats", "gmm", (dir / "bi.csv").string(), "--seed", "1"}).out == gmm.out);
}

TEST_CASE("topo subcommands") {
  const auto dir = scratch("topo");
  put(dir / "square.csv", "x,y\n0,0\n1,0\n1,1\n0,1\n");
  const auto r = call({"topo", "persistence", (dir / "square.csv").string(), "--plot", (dir / "d.svg").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["features"].size() == 5);
  CHECK(j["tau"].get<double>() == doctest::Approx((std::sqrt(2.0) - 1.0) / 3.0));
  CHECK(slurp(dir / "d.svg").find("<svg") == 0);
  put(dir / "a.csv", "dim,birth,death\n1,1,1.4142135623730951\n0,0,inf\n");
  put(dir / "b.csv", "dim,birth,death\n1,1,2\n0,0,inf\n");
  const auto bn = call({"topo", "bottleneck", (dir / "a.csv").string(), (dir / "b.csv").string(), "--dim", "1"});
  REQUIRE(bn.code == 0);
  CHECK(nlohmann::json::parse(bn.out)["bottleneck"].get<double>() == doctest::Approx(0.5));
  const auto ts = call({"topo", "tsas", (dir / "square.csv").string(), (dir / "square.csv").string()});
  REQUIRE(ts.code == 0);
  CHECK(nlohmann::json::parse(ts.out)["tsas"].get<double>() == 0.0);
}
