#ifndef RUMOR_REPORT_HPP
#define RUMOR_REPORT_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "rumor/numeric.hpp"

namespace rumor {

enum class Classification { dies_as, survives_pos_prob, survives_as, inconclusive };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::dies_as: return "dies_as";
    case Classification::survives_pos_prob: return "survives_pos_prob";
    case Classification::survives_as: return "survives_as";
    case Classification::inconclusive: return "inconclusive";
  }
  return "?";
}

struct SurvivalReport {
  Classification classification = Classification::inconclusive;
  std::optional<double> probability;
  std::optional<double> bound_low;
  std::optional<double> bound_high;
  double remainder_bound = 0.0;
  std::string criterion;
  std::string note;

  void check() const {
    if (probability && !(*probability >= 0.0 && *probability <= 1.0))
      throw std::logic_error("report: probability outside [0,1]");
    if (bound_low && bound_high && !(*bound_low <= *bound_high + 1e-15))
      throw std::logic_error("report: bounds inverted");
    if (!(remainder_bound >= 0.0))
      throw std::logic_error("report: negative remainder");
  }
};

inline SurvivalReport make_report(Classification c, std::string criterion,
                                  std::string note = "") {
  SurvivalReport r;
  r.classification = c;
  r.criterion = std::move(criterion);
  r.note = std::move(note);
  return r;
}

// Spreader-proportion constants for the reverse process: density = 1/mu,
// zero when mu is infinite. sigma2 only meaningful when mu is finite.
struct DensityConstants {
  double mu = kInf;
  double sigma2 = kInf;
  double density = 0.0;
  double mu_remainder = 0.0;
  double sigma2_remainder = 0.0;

  void check() const {
    if (!(mu >= 1.0)) throw std::logic_error("density: mu < 1");
    if (!(density >= 0.0 && density <= 1.0))
      throw std::logic_error("density: outside [0,1]");
  }
};

}  // namespace rumor

#endif  // RUMOR_REPORT_HPP
