#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "overlap/error.hpp"
#include "overlap/stats/changepoint.hpp"
#include "overlap/stats/density.hpp"
#include "overlap/stats/dip.hpp"
#include "overlap/stats/equivalence.hpp"
#include "overlap/stats/threshold.hpp"
#include "stats_oracle.hpp"
#include "support.hpp"

using namespace overlap;
using namespace overlap::stats;

namespace {

std::vector<double> mixture(std::size_t n, double m1, double s1, double m2, double s2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> a(m1, s1), b(m2, s2);
  std::bernoulli_distribution pick(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = pick(rng) ? b(rng) : a(rng);
  return v;
}

std::vector<double> gaussian_quantiles(std::size_t n, double mu, double sigma) {
  const boost::math::normal dist(mu, sigma);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = boost::math::quantile(dist, (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return v;
}

}  // namespace

TEST_CASE("dip statistic matches reference values") {
  const std::vector<double> a{0.773956, 0.438878, 0.858598, 0.697368, 0.094177, 0.975622, 0.76114, 0.786064,
                              0.128114, 0.450386, 0.370798, 0.926765, 0.643865, 0.822762, 0.443414};
  const std::vector<double> b{-0.859292, 0.368751, -0.958883, 0.87845,  -0.049926, -0.184862, -0.68093,
                              1.222541,  -0.154529, -0.428328, 4.647866, 5.532309,  5.365444,  5.412733,
                              5.430821,  7.141648,  4.593585,  4.487757, 4.186227,  5.615979};
  const std::vector<double> c{0.641557, 0.343833, 0.321911, 0.878915, 0.296947, 1.333702, 1.390864,
                              1.084083, 0.073028, 1.134068, 1.354338, 1.12204,  0.280049, 0.320936,
                              0.165736, 0.354364, 0.02114,  0.167356, 1.315057, 3.995756, 0.563538,
                              0.28404,  0.397756, 0.361342, 0.129634};
  CHECK(dip_statistic(a) == doctest::Approx(0.0944720526464201).epsilon(1e-12));
  CHECK(dip_statistic(b) == doctest::Approx(0.14400498725974759).epsilon(1e-12));
  CHECK(dip_statistic(c) == doctest::Approx(0.07821799844528489).epsilon(1e-12));
}

TEST_CASE("dip is permutation invariant and guarded") {
  auto x = mixture(120, 0, 1, 3, 1, 4);
  const double d0 = dip_statistic(x);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(x.begin(), x.end(), rng);
    CHECK(dip_statistic(x) == d0);
  }
  CHECK_THROWS_AS(dip_test(std::vector<double>(30, 2.0), 1), DegenerateError);
  CHECK_THROWS_AS(dip_test(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}, 1), ParameterError);
  const auto fit = dip_fit(x);
  CHECK(fit.modal_low <= fit.modal_high);
}

TEST_CASE("dip p-values: uniform accepted, bimodal rejected") {
  int accepted = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    if (dip_test(testsupport::uniform(200, 0, 1, 1000 + s), 7, 2000).p_value > 0.05) ++accepted;
  CHECK(accepted >= 95);
  const auto bimodal = mixture(200, 0, 1, 6, 1, 3);
  const auto r = dip_test(bimodal, 7, 2000);
  CHECK(r.p_value < 0.05);
  CHECK(r.draws == 2000);
  // Same seed, same answer.
  CHECK(dip_test(bimodal, 7, 2000).p_value == r.p_value);
}

TEST_CASE("KDE inflections of a Gaussian sit near mean +- sd") {
  // Quantile sample: random draws put real curvature wiggles into a
  // Silverman-bandwidth KDE, which is not what this checks.
  for (std::size_t n : {100, 500, 2000}) {
    const auto x = gaussian_quantiles(n, 1.5, 2.0);
    const auto inf = kde_inflections(x);
    REQUIRE(inf.size() == 2);
    CHECK(std::abs(inf[0] - (1.5 - 2.0)) < 0.2);
    CHECK(std::abs(inf[1] - (1.5 + 2.0)) < 0.2);
    CHECK(kde_modes(x).size() == 1);
  }
}

TEST_CASE("KDE inflections of a separated mixture and under shifts") {
  const auto x = mixture(1000, 0, 1, 8, 1, 5);
  const auto inf = kde_inflections(x);
  CHECK(inf.size() >= 4);
  CHECK(kde_modes(x).size() == 2);
  auto shifted = x;
  for (auto& v : shifted) v += 3.25;
  const auto inf2 = kde_inflections(shifted);
  REQUIRE(inf2.size() == inf.size());
  for (std::size_t i = 0; i < inf.size(); ++i) CHECK(inf2[i] == doctest::Approx(inf[i] + 3.25).epsilon(1e-9));
  CHECK_THROWS_AS(kde_inflections(std::vector<double>(40, 1.0)), DegenerateError);
  CHECK_THROWS_AS(kde_inflections(std::vector<double>(10, 1.0)), ParameterError);
}

TEST_CASE("GMM with BIC") {
  const auto one = testsupport::gaussian(500, 0, 1, 21);
  const auto r1 = gmm2_bic(one, 3);
  CHECK(r1.bic1 < r1.bic2);
  CHECK_FALSE(r1.crossover.has_value());

  const auto two = mixture(500, 0, 0.5, 4, 0.5, 22);
  const auto r2 = gmm2_bic(two, 3);
  CHECK(r2.bic2 < r2.bic1);
  REQUIRE(r2.crossover.has_value());
  CHECK(*r2.crossover > 1.5);
  CHECK(*r2.crossover < 2.5);
  CHECK(r2.two.components[0].mean < r2.two.components[1].mean);
  CHECK(r2.two.components[0].weight + r2.two.components[1].weight == doctest::Approx(1.0));
  // Same seed, same fit.
  CHECK(gmm2_bic(two, 3).bic2 == r2.bic2);

  const auto a = r2.two.components[0], b = r2.two.components[1];
  CHECK(*mixture_crossover(a, b) == *mixture_crossover(b, a));
  // Symmetric components cross at the midpoint.
  CHECK(*mixture_crossover({0.5, 0, 1}, {0.5, 4, 1}) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(gmm2_bic(std::vector<double>(10, 0.0), 1), ParameterError);
}

TEST_CASE("PELT examples") {
  CHECK(pelt(std::vector<double>(40, 3.0)).empty());
  auto x = testsupport::gaussian(100, 0, 0.1, 31);
  for (std::size_t i = 50; i < 100; ++i) x[i] += 5.0;
  const auto cps = pelt(x);
  REQUIRE(cps.size() == 1);
  CHECK(cps[0] >= 49);
  CHECK(cps[0] <= 51);
  CHECK_THROWS_AS(pelt(std::vector<double>{1, 2, 3}), ParameterError);
}

TEST_CASE("PELT equals unpruned optimal partitioning for n <= 60") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> seg(1, 15);
  std::normal_distribution<double> level(0.0, 2.0), noise(0.0, 0.5);
  int checked = 0;
  for (std::size_t n = 4; n <= 60; ++n) {
    for (int rep = 0; rep < 6; ++rep) {
      std::vector<double> x;
      while (x.size() < n) {
        const double lv = level(rng);
        for (int k = seg(rng); k > 0 && x.size() < n; --k) x.push_back(lv + noise(rng));
      }
      const double beta = rep % 2 == 0 ? default_penalty(x) : 0.25 * static_cast<double>(rep);
      const auto got = pelt(x, {beta});
      const auto want = oracle::partition_oracle(x, beta);
      CHECK(got == want);
      ++checked;
    }
  }
  CHECK(checked == 57 * 6);
}

TEST_CASE("TOST examples") {
  const auto a = testsupport::gaussian(200, 0, 1, 41);
  const auto same = tost(a, a);
  CHECK(same.equivalent);
  CHECK(same.effect == 0.0);
  CHECK(same.p_lower < 0.05);
  CHECK(same.p_upper < 0.05);
  CHECK(same.n_required == 310);

  const auto b = testsupport::gaussian(200, 0.5, 1, 42);
  CHECK_FALSE(tost(a, b).equivalent);

  // Mean gap of exactly delta pooled SDs.
  auto c = a;
  const double sd = std::sqrt(variance(a));
  for (auto& v : c) v += 0.2 * sd;
  const auto edge = tost(c, a);
  CHECK(edge.effect == doctest::Approx(0.2).epsilon(1e-9));
  CHECK_FALSE(edge.equivalent);
  CHECK(edge.p_upper >= 0.05);

  CHECK_THROWS_AS(tost(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)), DegenerateError);
  CHECK_THROWS_AS(tost(std::vector<double>{1, 2}, a), ParameterError);
  CHECK_THROWS_AS(tost(a, a, 0.0), ParameterError);
}

TEST_CASE("TOST equivalence iff interval inside the margin") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto x = testsupport::gaussian(50 + s % 40, 0, 1, 500 + s);
    const auto y = testsupport::gaussian(60 + s % 30, 0.01 * static_cast<double>(s % 30), 1, 900 + s);
    const auto r = tost(x, y, 0.3);
    CHECK(r.equivalent == (r.ci_low > -0.3 && r.ci_high < 0.3));
    CHECK(r.equivalent == (r.p_lower < 0.05 && r.p_upper < 0.05));
  }
}

TEST_CASE("TOST power sanity: never equivalent at |d| >= delta + 0.3") {
  int declared = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const double shift = s % 2 == 0 ? 0.5 : -0.5;
    if (tost(testsupport::gaussian(200, shift, 1, 3000 + s), testsupport::gaussian(200, 0, 1, 7000 + s)).equivalent)
      ++declared;
  }
  CHECK(declared == 0);
}

TEST_CASE("TOST sample size") {
  const auto s = tost_sample_size(0.2, 0.8, 0.05);
  CHECK(s.per_group == 310);
  REQUIRE(s.stated.has_value());
  CHECK(*s.stated == 192);
  CHECK(s.discrepancy);
  CHECK(s.exact == doctest::Approx(309.1).epsilon(1e-3));
  CHECK(tost_sample_size(1e6, 0.8, 0.05).per_group == 1);
  for (double d : {0.1, 0.3, 0.7}) {
    const auto full = tost_sample_size(d, 0.9, 0.025);
    const auto half = tost_sample_size(d / 2, 0.9, 0.025);
    CHECK(half.exact / full.exact == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_FALSE(full.stated.has_value());
  }
  CHECK_THROWS_AS(tost_sample_size(0.2, 1.0, 0.05), ParameterError);
  CHECK_THROWS_AS(tost_sample_size(0.2, 0.8, 0.5), ParameterError);
  CHECK_THROWS_AS(tost_sample_size(-1, 0.8, 0.05), ParameterError);
}

TEST_CASE("ETR") {
  CHECK(etr(0.2, 0.1, 0.1) == doctest::Approx(0.5));
  CHECK(etr(0.0, 0.3, 0.1) == 0.0);
  CHECK(etr(0.3, 0.0, 0.0) == 1.0);
  CHECK_THROWS_AS(etr(0, 0, 0), UndefinedError);
  CHECK_THROWS_AS(etr(-0.1, 0.2, 0.2), ParameterError);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1), k(0.01, 100);
  for (int i = 0; i < 200; ++i) {
    const double b = u(rng), c = u(rng), d = u(rng), s = k(rng);
    const double e = etr(b, c, d);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    CHECK(etr(s * b, s * c, s * d) == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("Pearson correlation") {
  const auto a = testsupport::gaussian(50, 0, 1, 61);
  auto neg = a;
  for (auto& v : neg) v = -v;
  CHECK(pearson(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(a, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto x = testsupport::gaussian(30, 1, 2, 100 + s), y = testsupport::uniform(30, -1, 3, 200 + s);
    // Raw-moment form: (E[xy] - E[x]E[y]) / sqrt((E[x^2] - E[x]^2)(E[y^2] - E[y]^2)).
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxy += x[i] * y[i];
      sxx += x[i] * x[i];
      syy += y[i] * y[i];
    }
    const double n = 30.0;
    const double want = (sxy / n - sx * sy / (n * n)) / std::sqrt((sxx / n - sx * sx / (n * n)) * (syy / n - sy * sy / (n * n)));
    CHECK(std::abs(pearson(x, y) - want) < 1e-12);
  }
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ParameterError);
}

TEST_CASE("running median") {
  const std::vector<double> x{1, 9, 2, 8, 3, 100, 4};
  const auto m = running_median(x, 3);
  CHECK(m == std::vector<double>{5, 2, 8, 3, 8, 4, 52});
  CHECK_THROWS_AS(running_median(x, 4), ParameterError);
}

TEST_CASE("threshold report") {
  // NS: two clusters; tension: high, then collapsing past NS = 2.
  const auto ns = mixture(300, 1.0, 0.15, 2.6, 0.15, 71);
  std::vector<double> tension(ns.size());
  std::mt19937_64 rng(72);
  std::normal_distribution<double> noise(0.0, 0.02);
  for (std::size_t i = 0; i < ns.size(); ++i) tension[i] = (ns[i] < 2.0 ? 0.8 : 0.2) + noise(rng);
  ThresholdOptions o;
  o.dip_draws = 1000;
  const auto r = detect_thresholds(ns, tension, 5, o);
  CHECK(r.dip_p < 0.05);
  REQUIRE(r.mode_gap_midpoint.has_value());
  CHECK(std::abs(*r.mode_gap_midpoint - 1.8) < 0.15);
  REQUIRE(r.gmm_crossover.has_value());
  CHECK(std::abs(*r.gmm_crossover - 1.8) < 0.15);
  CHECK(r.kde_inflections.size() >= 4);
  CHECK(r.kappa_low.has_value() == r.agreement);
  REQUIRE_FALSE(r.changepoints.empty());
  REQUIRE(r.kappa_high.has_value());
  CHECK(*r.kappa_high > 1.2);
  CHECK(*r.kappa_high < 2.5);
  CHECK(*r.tension_drop > 0.5);

  const auto j = to_json(r);
  CHECK(j.at("agreement").get<bool>() == r.agreement);
  CHECK(j.at("kde_inflections").size() == r.kde_inflections.size());

  // Unimodal NS: no lower threshold.
  const auto flat = testsupport::gaussian(200, 1.0, 0.2, 73);
  const auto u = detect_thresholds(flat, {}, 5, o);
  CHECK_FALSE(u.kappa_low.has_value());
  CHECK_FALSE(u.kappa_high.has_value());
}

TEST_CASE("JSON for equivalence results") {
  const auto s = to_json(tost_sample_size());
  CHECK(s.at("per_group") == 310);
  CHECK(s.at("stated") == 192);
  CHECK(s.at("discrepancy") == true);
  const auto a = testsupport::gaussian(200, 0, 1, 1);
  const auto j = to_json(tost(a, a));
  CHECK(j.at("equivalent") == true);
  CHECK(j.at("n_required") == 310);
}

TEST_CASE("upper threshold needs a large enough drop") {
  std::vector<double> ns(80), big(80), small(80);
  const auto jitter = testsupport::gaussian(80, 0.0, 0.01, 5);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ns[i] = 0.05 * static_cast<double>(i);
    big[i] = (i < 40 ? 1.0 : 0.2) + jitter[i];
    small[i] = (i < 40 ? 1.0 : 0.8) + jitter[i];
  }
  stats::ThresholdOptions o;
  stats::ThresholdReport a, b;
  stats::detect_upper_threshold(ns, big, o, a);
  REQUIRE(a.kappa_high.has_value());
  CHECK(*a.kappa_high == doctest::Approx(0.5 * (ns[39] + ns[40])).epsilon(0.05));
  CHECK(a.tension_drop > 0.5);
  stats::detect_upper_threshold(ns, small, o, b);
  CHECK_FALSE(b.kappa_high.has_value());
  CHECK(b.tension_drop < 0.5);
}
