#ifndef RUMOR_COVERAGE_HPP
#define RUMOR_COVERAGE_HPP

// Coverage of the half line by randomly placed intervals. Two sources of
// intervals: an on/off Markov chain that drops [i, i + rho_i] at its 1-states,
// and a Poisson point process on the positive reals dropping [xi, xi + rho].
// Criteria classify eventual coverage (all but finitely much of the space)
// from tail envelopes; simulators sweep realized interval unions and report
// trend statistics, since eventual coverage itself has no finite-window test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rumor/law.hpp"
#include "rumor/numeric.hpp"
#include "rumor/rng.hpp"

namespace rumor {

enum class CoverageOutcome { covers_as, never_covers, inconclusive };

inline const char* to_string(CoverageOutcome o) {
  switch (o) {
    case CoverageOutcome::covers_as:
      return "covers_as";
    case CoverageOutcome::never_covers:
      return "never_covers";
    default:
      return "inconclusive";
  }
}

// P(rho > x) = min(1, c x^-a): the one continuous radius family the external
// interfaces accept ("pow:c,a").
struct PowerTail {
  double c = 1.0;
  double a = 1.0;

  PowerTail(double c_, double a_) : c(c_), a(a_) {
    detail::require(c > 0.0 && std::isfinite(c), "power tail: c must be positive");
    detail::require(a > 0.0 && std::isfinite(a), "power tail: a must be positive");
  }

  double operator()(double x) const {
    if (x <= 0.0) return 1.0;
    return std::min(1.0, c * std::pow(x, -a));
  }

  // inverse of the tail on (0, 1]: the value x with P(rho > x) = u
  double inverse_tail(double u) const { return std::pow(c / u, 1.0 / a); }

  // lim inf / lim sup of x P(rho > x); they coincide for this family
  double weight_liminf() const { return a < 1.0 ? kInf : a == 1.0 ? c : 0.0; }
  double weight_limsup() const { return weight_liminf(); }

  // E(rho^d) diverges exactly when the tail integral int x^{d-1-a} dx does
  bool moment_infinite(int d) const { return a <= static_cast<double>(d); }

  std::string literal() const {
    return "pow:" + detail::fmt_num(c) + "," + detail::fmt_num(a);
  }

  static PowerTail parse(const std::string& text) {
    detail::require(text.rfind("pow:", 0) == 0, "power tail: expected pow:c,a");
    auto comma = text.find(',', 4);
    detail::require(comma != std::string::npos, "power tail: expected pow:c,a");
    try {
      return PowerTail(std::stod(text.substr(4, comma - 4)), std::stod(text.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("power tail: cannot parse \"" + text + "\"");
    }
  }
};

// ---------------------------------------------------------------------------
// Markov-driven interval coverage of the positive integers.

struct MarkovCoverageConfig {
  double p01;       // P(next on | off); the off-state must be leavable
  double p10;       // P(next off | on); the on-state must be leavable
  Law rho;          // interval length dropped at each on-state
  int64_t horizon;  // simulation window

  MarkovCoverageConfig(double p01_, double p10_, Law rho_, int64_t horizon_)
      : p01(p01_), p10(p10_), rho(std::move(rho_)), horizon(horizon_) {
    detail::require(p01 > 0.0 && p01 < 1.0, "markov coverage: p01 outside (0,1)");
    detail::require(p10 > 0.0 && p10 < 1.0, "markov coverage: p10 outside (0,1)");
    detail::require(horizon >= 1, "markov coverage: horizon must be at least 1");
  }

  // stationary frequency of on-states
  double pi1() const { return p01 / (p01 + p10); }
};

struct MarkovCoverageReport {
  CoverageOutcome outcome = CoverageOutcome::inconclusive;
  double pi1 = kNaN;
  double weight_lo = 0.0;   // liminf of j P(rho > j)
  double weight_hi = kInf;  // limsup of j P(rho > j)
  std::string criterion;
  std::string note;
};

// All but finitely many sites are covered a.s. when the stationary on-rate
// exceeds the reciprocal tail weight; never when it falls below it. Between
// the two thresholds (or with an unpinned envelope) the answer stays open.
inline MarkovCoverageReport markov_coverage_criteria(const MarkovCoverageConfig& cfg) {
  MarkovCoverageReport rep;
  rep.pi1 = cfg.pi1();
  // j P(rho > j) = j tail(j+1) has the same limit points as j tail(j)
  const Decay& d = cfg.rho.decay();
  rep.weight_lo = detail::n_tail_liminf(d);
  rep.weight_hi = detail::n_tail_limsup(d);

  if (rep.weight_lo > 1.0 && rep.pi1 * rep.weight_lo > 1.0 + 1e-11) {
    rep.outcome = CoverageOutcome::covers_as;
    rep.criterion = "on-density-above-tail-threshold";
    return rep;
  }
  if (std::isfinite(rep.weight_hi) && rep.pi1 * rep.weight_hi < 1.0 - 1e-11) {
    rep.outcome = CoverageOutcome::never_covers;
    rep.criterion = "on-density-below-tail-threshold";
    return rep;
  }
  rep.outcome = CoverageOutcome::inconclusive;
  rep.criterion = "tail-thresholds-unresolved";
  rep.note = rep.weight_lo <= 1.0 && !std::isfinite(rep.weight_hi)
                 ? "tail weight envelope pins neither threshold"
                 : "stationary on-rate falls between the coverage thresholds";
  return rep;
}

// ---------------------------------------------------------------------------
// Poisson Boolean coverage of the positive orthant.

struct BooleanConfig {
  double lambda;   // point process intensity
  PowerTail rho;   // continuous radius tail
  int d;           // dimension of the orthant
  double horizon;  // simulation window (d = 1 only)

  BooleanConfig(double lambda_, PowerTail rho_, int d_, double horizon_ = 1.0)
      : lambda(lambda_), rho(rho_), d(d_), horizon(horizon_) {
    detail::require(lambda > 0.0 && std::isfinite(lambda),
                    "boolean coverage: lambda must be positive");
    detail::require(d >= 1, "boolean coverage: dimension must be at least 1");
    detail::require(horizon > 0.0, "boolean coverage: horizon must be positive");
  }
};

struct BooleanCoverageReport {
  CoverageOutcome outcome = CoverageOutcome::inconclusive;
  int d = 1;
  double lambda = kNaN;
  double weight_lo = 0.0;                  // liminf x P(rho > x)
  double weight_hi = kInf;                 // limsup x P(rho > x)
  std::optional<double> threshold_max;     // critical intensity is at most 1/liminf
  std::optional<double> threshold_min;     // critical intensity is at least 1/limsup
  bool full_coverage = false;              // E(rho^d) = inf: the whole space is covered
  std::string criterion;
  std::string note;
};

// Eventual coverage of [t, inf)^d for some finite t. In one dimension the
// tail weight x P(rho > x) trades off against the intensity through a single
// critical point, bracketed by the reciprocal weights; in higher dimensions
// the intensity drops out entirely. E(rho^d) = inf additionally covers the
// whole space, which the orthant's boundary effect does not inherit.
inline BooleanCoverageReport boolean_criteria(const BooleanConfig& cfg) {
  BooleanCoverageReport rep;
  rep.d = cfg.d;
  rep.lambda = cfg.lambda;
  rep.weight_lo = cfg.rho.weight_liminf();
  rep.weight_hi = cfg.rho.weight_limsup();
  rep.full_coverage = cfg.rho.moment_infinite(cfg.d);
  if (rep.full_coverage)
    rep.note = "infinite d-th moment: the whole space is covered outright";

  if (cfg.d >= 2) {
    if (rep.weight_lo > 0.0) {
      rep.outcome = CoverageOutcome::covers_as;
      rep.criterion = "positive-tail-weight-any-intensity";
    } else {
      rep.outcome = CoverageOutcome::never_covers;
      rep.criterion = "vanishing-tail-weight";
    }
    return rep;
  }

  if (!std::isfinite(rep.weight_lo)) {
    rep.outcome = CoverageOutcome::covers_as;
    rep.criterion = "diverging-tail-weight-any-intensity";
    return rep;
  }
  if (rep.weight_lo <= 0.0) {
    // the tail weight vanishes: domination by min(1, eps/x) tails, which fail
    // at every fixed intensity, settles non-coverage; the published claim of
    // coverage in this regime contradicts the phase transition and is ignored
    rep.outcome = CoverageOutcome::never_covers;
    rep.criterion = "vanishing-tail-weight";
    if (!rep.note.empty()) rep.note += "; ";
    rep.note += "classified by monotone domination; the opposite classical claim "
                "for vanishing weights is treated as unreliable";
    return rep;
  }

  rep.threshold_max = 1.0 / rep.weight_lo;
  rep.threshold_min = 1.0 / rep.weight_hi;
  if (cfg.lambda * rep.weight_lo > 1.0 + 1e-11) {
    rep.outcome = CoverageOutcome::covers_as;
    rep.criterion = "intensity-above-critical-bracket";
  } else if (cfg.lambda * rep.weight_hi < 1.0 - 1e-11) {
    rep.outcome = CoverageOutcome::never_covers;
    rep.criterion = "intensity-below-critical-bracket";
  } else {
    rep.outcome = CoverageOutcome::inconclusive;
    rep.criterion = "intensity-inside-critical-bracket";
    if (!rep.note.empty()) rep.note += "; ";
    rep.note += "the critical intensity is only bracketed";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Simulation: realized interval unions and their sweep statistics.

namespace detail {

constexpr std::uint64_t kChainKey = 0x636f766572636861ULL;  // chain sub-stream
constexpr std::uint32_t kRadiusSalt = 2;

struct MarkovRealization {
  std::vector<int64_t> ends;  // ends[i-1] = i + rho_i at on-states, -1 at off-states
  int64_t ones = 0;
};

inline MarkovRealization markov_realization(const MarkovCoverageConfig& cfg,
                                            const TrialRng& rng) {
  MarkovRealization out;
  out.ends.resize(static_cast<size_t>(cfg.horizon), -1);
  SplitMix64 chain = rng.stream(kChainKey);
  // the chain starts from its stationary law; eventual coverage does not
  // depend on the initial state, and diagnostics then match pi1 exactly
  int x = chain.uniform01() < cfg.pi1() ? 1 : 0;
  for (int64_t i = 1; i <= cfg.horizon; ++i) {
    if (i > 1) {
      double u = chain.uniform01();
      x = x == 1 ? (u < cfg.p10 ? 0 : 1) : (u < cfg.p01 ? 1 : 0);
    }
    if (x == 1) {
      ++out.ones;
      int64_t r = cfg.rho.sample_keyed(rng, static_cast<std::uint64_t>(i), kRadiusSalt);
      out.ends[static_cast<size_t>(i) - 1] = i + r;
    }
  }
  return out;
}

}  // namespace detail

struct MarkovCoverageTrial {
  int64_t last_uncovered = 0;   // largest uncovered site in [1, horizon]; 0 if none
  int64_t longest_gap = 0;      // longest run of consecutive uncovered sites
  double covered_back = 1.0;    // covered fraction of (horizon/2, horizon]
  double on_fraction = 0.0;     // realized frequency of on-states
};

namespace detail {

// Site i is covered exactly when some j <= i has an interval reaching i, so
// one left-to-right pass over the running maximum of the ends suffices.
inline MarkovCoverageTrial sweep_sites(const std::vector<int64_t>& ends) {
  MarkovCoverageTrial out;
  int64_t horizon = static_cast<int64_t>(ends.size());
  int64_t reach = 0, gap = 0, back_covered = 0;
  int64_t back_start = horizon / 2 + 1;
  for (int64_t i = 1; i <= horizon; ++i) {
    reach = std::max(reach, ends[static_cast<size_t>(i) - 1]);
    if (reach >= i) {
      gap = 0;
      if (i >= back_start) ++back_covered;
    } else {
      out.last_uncovered = i;
      out.longest_gap = std::max(out.longest_gap, ++gap);
    }
  }
  int64_t back_len = horizon - back_start + 1;
  out.covered_back =
      back_len > 0 ? static_cast<double>(back_covered) / static_cast<double>(back_len) : 1.0;
  return out;
}

}  // namespace detail

inline MarkovCoverageTrial sim_markov_coverage(const MarkovCoverageConfig& cfg,
                                               const TrialRng& rng) {
  detail::MarkovRealization real = detail::markov_realization(cfg, rng);
  MarkovCoverageTrial out = detail::sweep_sites(real.ends);
  out.on_fraction = static_cast<double>(real.ones) / static_cast<double>(cfg.horizon);
  return out;
}

struct BooleanTrial {
  double uncovered_sup = 0.0;  // supremum of uncovered points in (0, horizon]
  double longest_gap = 0.0;    // longest uncovered stretch, boundary gaps included
  double covered_back = 1.0;   // covered fraction of (horizon/2, horizon]
  int64_t point_count = 0;
};

namespace detail {

// Sweep a union of [start, end] intervals, sorted by start, across (0, T].
inline BooleanTrial sweep_intervals(const std::vector<std::pair<double, double>>& iv,
                                    double T) {
  BooleanTrial out;
  double reach = 0.0;
  double back_covered = 0.0, back_start = T / 2.0;
  auto credit_back = [&](double from, double to) {
    double lo = std::max(from, back_start), hi = std::min(to, T);
    if (hi > lo) back_covered += hi - lo;
  };
  for (const auto& [s, e] : iv) {
    if (s > T) break;
    if (s > reach) {
      // the open gap (reach, s) is uncovered; its supremum is min(s, T)
      if (reach < T) {
        out.uncovered_sup = std::min(s, T);
        out.longest_gap = std::max(out.longest_gap, std::min(s, T) - reach);
      }
      reach = s;
    }
    if (e > reach) {
      credit_back(reach, e);
      reach = e;
    }
  }
  if (reach < T) {
    out.uncovered_sup = T;
    out.longest_gap = std::max(out.longest_gap, T - reach);
  }
  out.covered_back = std::min(1.0, back_covered / (T - back_start));
  return out;
}

}  // namespace detail

// One realization of the one-dimensional model on (0, horizon]: Poisson
// points by exponential spacings, each carrying an interval [xi, xi + rho].
inline BooleanTrial sim_boolean_1d(const BooleanConfig& cfg, const TrialRng& rng) {
  detail::require(cfg.d == 1, "sim_boolean_1d: only the one-dimensional model is simulated");
  SplitMix64 spacing = rng.stream(detail::kChainKey, 1);
  std::vector<std::pair<double, double>> iv;
  double xi = 0.0;
  for (std::uint64_t idx = 0;; ++idx) {
    double u = 1.0 - spacing.uniform01();  // in (0, 1]
    xi += -std::log(u) / cfg.lambda;
    if (xi > cfg.horizon) break;
    double v = 1.0 - rng.uniform01(idx, detail::kRadiusSalt);
    iv.emplace_back(xi, xi + cfg.rho.inverse_tail(v));
  }
  BooleanTrial out = detail::sweep_intervals(iv, cfg.horizon);
  out.point_count = static_cast<int64_t>(iv.size());
  return out;
}

}  // namespace rumor

#endif  // RUMOR_COVERAGE_HPP
