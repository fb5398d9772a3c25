#include "overlap/uoo/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "overlap/error.hpp"

namespace overlap::uoo {

std::string to_string(DecayMode m) {
  switch (m) {
    case DecayMode::constant: return "constant";
    case DecayMode::linear: return "linear";
    case DecayMode::step: return "step";
  }
  return "constant";
}

DecayMode decay_mode_from_string(const std::string& s) {
  if (s == "constant") return DecayMode::constant;
  if (s == "linear") return DecayMode::linear;
  if (s == "step") return DecayMode::step;
  throw ParameterError("unknown alpha decay mode '" + s + "'");
}

AlphaSchedule::AlphaSchedule(double alpha0, DecayMode mode, double floor, double kappa_low, double kappa_high)
    : alpha0_(alpha0), mode_(mode), floor_(floor), kappa_low_(kappa_low), kappa_high_(kappa_high), current_(alpha0) {
  if (!(floor >= 0.0) || !(alpha0 >= floor)) throw ParameterError("alpha schedule needs alpha0 >= floor >= 0");
}

double AlphaSchedule::at(int epoch, int total_epochs) const {
  switch (mode_) {
    case DecayMode::constant: return alpha0_;
    case DecayMode::step: return current_;
    case DecayMode::linear: {
      if (total_epochs <= 1) return floor_;
      const double frac = std::clamp(static_cast<double>(epoch) / static_cast<double>(total_epochs - 1), 0.0, 1.0);
      return alpha0_ + (floor_ - alpha0_) * frac;
    }
  }
  return alpha0_;
}

bool AlphaSchedule::observe_ns(double ns) {
  if (mode_ != DecayMode::step || std::isnan(kappa_high_) || !(ns > kappa_high_)) return false;
  const double next = std::max(floor_, 0.5 * current_);
  if (next == current_) return false;
  current_ = next;
  ++reductions_;
  return true;
}

nlohmann::json AlphaSchedule::to_json() const {
  nlohmann::json j{{"alpha0", alpha0_}, {"mode", to_string(mode_)}, {"floor", floor_}};
  j["kappa_low"] = std::isnan(kappa_low_) ? nlohmann::json(nullptr) : nlohmann::json(kappa_low_);
  j["kappa_high"] = std::isnan(kappa_high_) ? nlohmann::json(nullptr) : nlohmann::json(kappa_high_);
  return j;
}

AlphaSchedule AlphaSchedule::from_json(const nlohmann::json& j) {
  auto opt = [&](const char* key) {
    return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<double>() : std::numeric_limits<double>::quiet_NaN();
  };
  return AlphaSchedule(j.value("alpha0", 0.1), decay_mode_from_string(j.value("mode", std::string("constant"))),
                       j.value("floor", 0.0), opt("kappa_low"), opt("kappa_high"));
}

}  // namespace overlap::uoo
