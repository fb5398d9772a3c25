#include "overlap/stats/equivalence.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "overlap/error.hpp"
#include "overlap/stats/density.hpp"

namespace overlap::stats {

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ParameterError("cohens_d needs two values per group");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double pooled = ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0);
  if (!(pooled > 0.0)) throw DegenerateError("pooled variance is zero");
  return (mean(a) - mean(b)) / std::sqrt(pooled);
}

TostResult tost(std::span<const double> a, std::span<const double> b, double delta, double alpha) {
  if (a.size() < 3 || b.size() < 3) throw ParameterError("tost needs at least 3 values per group");
  if (!(delta > 0.0)) throw ParameterError("tost margin must be positive");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("tost alpha must lie in (0, 0.5)");
  TostResult r;
  r.delta = delta;
  r.alpha = alpha;
  r.n_a = a.size();
  r.n_b = b.size();
  r.effect = cohens_d(a, b);
  const double df = static_cast<double>(a.size() + b.size() - 2);
  const double se = std::sqrt(1.0 / static_cast<double>(a.size()) + 1.0 / static_cast<double>(b.size()));
  const boost::math::students_t t(df);
  const double crit = boost::math::quantile(t, 1.0 - alpha);
  r.ci_low = r.effect - crit * se;
  r.ci_high = r.effect + crit * se;
  r.p_lower = boost::math::cdf(boost::math::complement(t, (r.effect + delta) / se));
  r.p_upper = boost::math::cdf(t, (r.effect - delta) / se);
  r.equivalent = r.ci_low > -delta && r.ci_high < delta;
  r.n_required = tost_sample_size(delta, 0.8, alpha).per_group;
  return r;
}

SampleSize tost_sample_size(double delta, double power, double alpha) {
  if (!(delta > 0.0)) throw ParameterError("sample size needs delta > 0");
  if (!(power > 0.0 && power < 1.0)) throw ParameterError("power must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha must lie in (0, 0.5)");
  const boost::math::normal z;
  const double s = boost::math::quantile(z, 1.0 - alpha) + boost::math::quantile(z, power);
  SampleSize r;
  r.exact = 2.0 * s * s / (delta * delta);
  r.per_group = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r.exact)));
  if (delta == 0.2 && power == 0.8 && alpha == 0.05) {
    r.stated = 192;
    r.discrepancy = r.per_group != 192;
  }
  return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 3) throw ParameterError("pearson needs equal lengths >= 3");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateError("pearson with a zero-variance series");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double etr(double p_b, double p_c, double p_d) {
  if (p_b < 0.0 || p_c < 0.0 || p_d < 0.0) throw ParameterError("etr probabilities must be non-negative");
  const double total = p_b + p_c + p_d;
  if (!(total > 0.0)) throw UndefinedError("etr is undefined without any error mass");
  return p_b / total;
}

nlohmann::json to_json(const TostResult& r) {
  return {{"delta", r.delta},   {"alpha", r.alpha},     {"effect", r.effect},         {"ci_low", r.ci_low},
          {"ci_high", r.ci_high}, {"p_lower", r.p_lower}, {"p_upper", r.p_upper},     {"equivalent", r.equivalent},
          {"n_a", r.n_a},         {"n_b", r.n_b},         {"n_required", r.n_required}};
}

nlohmann::json to_json(const SampleSize& s) {
  nlohmann::json j{{"per_group", s.per_group}, {"exact", s.exact}, {"discrepancy", s.discrepancy}};
  j["stated"] = s.stated ? nlohmann::json(*s.stated) : nlohmann::json(nullptr);
  return j;
}

}  // namespace overlap::stats
