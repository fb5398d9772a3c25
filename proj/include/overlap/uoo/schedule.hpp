#pragma once

#include <limits>
#include <string>

#include <json.hpp>

namespace overlap::uoo {

enum class DecayMode { constant, linear, step };

std::string to_string(DecayMode m);
DecayMode decay_mode_from_string(const std::string& s);

/// Weight of the topology term over training. `linear` moves from alpha0 to
/// floor across the run; `step` halves alpha (down to floor) every time an
/// observed NS exceeds the upper guard `kappa_high`.
class AlphaSchedule {
 public:
  AlphaSchedule() = default;
  AlphaSchedule(double alpha0, DecayMode mode, double floor = 0.0,
                double kappa_low = std::numeric_limits<double>::quiet_NaN(),
                double kappa_high = std::numeric_limits<double>::quiet_NaN());

  double alpha0() const { return alpha0_; }
  DecayMode mode() const { return mode_; }
  double floor() const { return floor_; }

  double at(int epoch, int total_epochs) const;
  // Feeds the guard band; returns true when alpha was reduced.
  bool observe_ns(double ns);
  int reductions() const { return reductions_; }

  nlohmann::json to_json() const;
  static AlphaSchedule from_json(const nlohmann::json& j);

 private:
  double alpha0_ = 0.1;
  DecayMode mode_ = DecayMode::constant;
  double floor_ = 0.0;
  double kappa_low_ = std::numeric_limits<double>::quiet_NaN();
  double kappa_high_ = std::numeric_limits<double>::quiet_NaN();
  double current_ = 0.1;
  int reductions_ = 0;
};

}  // namespace overlap::uoo
