#ifndef RUMOR_LINE_HPP
#define RUMOR_LINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "rumor/law.hpp"
#include "rumor/numeric.hpp"
#include "rumor/report.hpp"
#include "rumor/seq.hpp"

namespace rumor {

namespace detail {

// Pure product model: b_{j+1} = b_j * (1 - c/(j+1+s)), i.e. the partial
// products of cdf factors when tail(k) = c/(k+s) exactly. Closed tail sums:
//   T(J) = sum_{j>=J} b_j     = b_J (J + s) / (c - 1)          (c > 1)
//   U(J) = sum_{j>=J} j b_j   = b_J (J^2 + pJ + q) / (c - 2)   (c > 2)
// both verified against the one-step recurrence in tests.
inline double pure_product_tail(double bJ, int64_t J, double c, double s) {
  return bJ * (static_cast<double>(J) + s) / (c - 1.0);
}

inline double pure_product_tail_weighted(double bJ, int64_t J, double c, double s) {
  double p = (c * (s - 1.0) + 1.0) / (c - 1.0);
  double q = (1.0 + s) * (1.0 + p) / c - 1.0 - p;
  double Jd = static_cast<double>(J);
  return bJ * (Jd * Jd + p * Jd + q) / (c - 2.0);
}

}  // namespace detail

// Internal analysis of the survival series sum_{j>=1} a_j with
// a_j = prod_{i=0}^{j-1} P(R <= i). Divergence is only ever certified
// symbolically from the tail descriptor; convergent sums carry a rigorous
// remainder.
struct ProductSeriesResult {
  bool divergent = false;
  bool convergent = false;
  double sum = 0.0;        // sum_{j>=1} a_j
  double remainder = 0.0;  // bound on |true - sum| when convergent
  std::string criterion;
};

inline ProductSeriesResult fireworks_series(const Law& R, double tol = 1e-12) {
  ProductSeriesResult out;
  if (R.cdf(0) == 0.0) {
    // P(R >= 1) = 1: every a_j vanishes, the rumor relays unconditionally
    out.convergent = true;
    out.sum = 0.0;
    out.remainder = 0.0;
    out.criterion = "immediate-relay";
    return out;
  }

  SeriesValue mean = R.mean();
  if (!mean.infinite && !std::isnan(mean.value)) {
    // sum of tails finite and no zero factor: a_j is bounded away from 0
    out.divergent = true;
    out.criterion = "finite-mean-radius";
    return out;
  }

  const Decay& d = R.decay();
  if (d.kind != Decay::Kind::power) {
    out.criterion = "no-usable-tail-descriptor";
    return out;
  }

  double a = d.exponent;
  if (a == 1.0 && d.log_exp > 0.0 && std::isfinite(d.coeff_hi)) {
    // tail ~ c/(k ln^b k): ln(1/a_j) grows slower than eps*ln j for every
    // eps, so a_j dominates j^-eps and the series diverges
    out.divergent = true;
    out.criterion = "slowly-varying-tail";
    return out;
  }

  if (a == 1.0 && d.log_exp == 0.0) {
    bool exact = d.has_shift_envelope && d.shift_lo == d.shift_hi;
    double c_lo = d.has_shift_envelope ? d.coeff : d.coeff_lo;
    double c_hi = d.has_shift_envelope ? d.coeff : d.coeff_hi;
    if (c_hi <= 1.0) {
      // a_j decays no faster than j^-1
      out.divergent = true;
      out.criterion = "harmonic-tail-coefficient-at-most-1";
      return out;
    }
    if (c_lo <= 1.0) {
      out.criterion = "harmonic-tail-coefficient-ambiguous";
      return out;
    }
    // convergent: numeric prefix + closed-form tail of the pure model
    double s_lo = d.has_shift_envelope ? d.shift_lo : 0.0;
    double s_hi = d.has_shift_envelope ? d.shift_hi : 0.0;
    double c = d.has_shift_envelope ? d.coeff : c_lo;  // c_lo is the safe side
    int64_t J = std::max<int64_t>(d.valid_from + 8, 1024);
    if (!exact) {
      // widen the numeric prefix until the envelope width is below tol
      while (J < (1 << 22)) {
        double aJ_est = std::pow(static_cast<double>(J), -c + 0.5);  // crude scale probe
        if (aJ_est * (s_hi - s_lo + 1.0) / (c - 1.0) < tol) break;
        J *= 2;
      }
    }
    NeumaierSum acc;
    double aj = 1.0;
    for (int64_t j = 1; j < J; ++j) {
      aj *= R.cdf(j - 1);
      acc.add(aj);
    }
    double aJ = aj * R.cdf(J - 1);
    double t_hi = detail::pure_product_tail(aJ, J, c, s_hi);
    double t_lo = exact ? t_hi : detail::pure_product_tail(aJ, J, c, s_lo);
    out.convergent = true;
    out.sum = acc.value() + 0.5 * (t_lo + t_hi);
    out.remainder = 0.5 * (t_hi - t_lo) + 1e-14 * (1.0 + out.sum);
    out.criterion = exact ? "rational-tail-telescoping" : "rational-tail-envelope";
    return out;
  }

  if (a < 1.0 && d.log_exp == 0.0 && d.loglog_exp == 0.0 && d.coeff_lo > 0.0) {
    // a_j <= exp(-c_lo j^{1-a} 2^{-a} + ...): stretched-exponential decay;
    // doubling blocks [j, 2j) shrink geometrically once
    // 2 exp(-c_lo j^{1-a} 2^{-a}) <= 1/2, giving remainder <= 2 j a_j
    NeumaierSum acc;
    double aj = 1.0;
    int64_t j = 1;
    double rem = kInf;
    for (; j < (1 << 22); ++j) {
      aj *= R.cdf(j - 1);
      acc.add(aj);
      if (j > d.valid_from) {
        double block_ratio =
            2.0 * std::exp(-d.coeff_lo * std::pow(static_cast<double>(j), 1.0 - a) *
                           std::pow(2.0, -a));
        if (block_ratio <= 0.5) {
          rem = 2.0 * static_cast<double>(j) * aj;
          if (rem < tol) break;
        }
      }
    }
    out.convergent = true;
    out.sum = acc.value();
    out.remainder = std::min(rem, kInf);
    out.criterion = "stretched-exponential-product";
    return out;
  }

  out.criterion = "no-usable-tail-descriptor";
  return out;
}

// P(V) for the direct process on N: [1 + sum_j prod_{i<j} P(R<=i)]^{-1};
// zero exactly when the series is proven divergent.
inline SurvivalReport fireworks_survival(const Law& R, double tol = 1e-12) {
  ProductSeriesResult series = fireworks_series(R, tol);
  SurvivalReport rep;
  rep.criterion = series.criterion;
  if (series.divergent) {
    rep.classification = Classification::dies_as;
    rep.probability = 0.0;
    rep.remainder_bound = 0.0;
    return rep;
  }
  if (series.convergent) {
    double S = 1.0 + series.sum;
    double p = 1.0 / S;
    rep.probability = p;
    // |d(1/S)| <= rem / S^2 on the remainder interval
    rep.remainder_bound = series.remainder / (S * std::max(1.0, S - series.remainder));
    rep.bound_low = 1.0 / (S + series.remainder);
    rep.bound_high = 1.0 / std::max(1.0, S - series.remainder);
    rep.classification =
        p >= 1.0 ? Classification::survives_as : Classification::survives_pos_prob;
    return rep;
  }
  rep.classification = Classification::inconclusive;
  return rep;
}

// Trichotomy in L = lim n P(R >= n).
inline SurvivalReport fireworks_tail_class(const Law& R) {
  const Decay& d = R.decay();
  SurvivalReport rep;
  switch (d.kind) {
    case Decay::Kind::bounded:
    case Decay::Kind::geometric:
      rep.classification = Classification::dies_as;
      rep.criterion = "tail-limit-zero";
      rep.probability = 0.0;
      return rep;
    case Decay::Kind::power: {
      if (d.exponent > 1.0 || (d.exponent == 1.0 && d.log_exp > 0.0)) {
        rep.classification = Classification::dies_as;
        rep.criterion = "tail-limit-below-1";
        rep.probability = 0.0;
        return rep;
      }
      if (d.exponent < 1.0) {
        if (d.coeff_lo > 0.0) {
          rep.classification = Classification::survives_pos_prob;
          rep.criterion = "tail-limit-infinite";
          return rep;
        }
        break;
      }
      // exponent == 1, no logs: L is the coefficient
      double L = d.coeff;
      if (!std::isnan(L)) {
        if (L > 1.0) {
          rep.classification = Classification::survives_pos_prob;
          rep.criterion = "tail-limit-above-1";
          return rep;
        }
        if (L < 1.0) {
          rep.classification = Classification::dies_as;
          rep.criterion = "tail-limit-below-1";
          rep.probability = 0.0;
          return rep;
        }
        // L == 1: need P(R >= n) <= 1/(n-1) eventually, i.e. 1/(n+s) with
        // s >= -1
        if (d.has_shift_envelope && d.shift_lo == d.shift_hi && d.shift_lo >= -1.0) {
          rep.classification = Classification::dies_as;
          rep.criterion = "critical-tail-dominated";
          rep.probability = 0.0;
          return rep;
        }
        break;
      }
      if (d.coeff_lo > 1.0) {
        rep.classification = Classification::survives_pos_prob;
        rep.criterion = "tail-limit-above-1";
        return rep;
      }
      if (d.coeff_hi < 1.0) {
        rep.classification = Classification::dies_as;
        rep.criterion = "tail-limit-below-1";
        rep.probability = 0.0;
        return rep;
      }
      break;
    }
    case Decay::Kind::unknown:
      throw std::invalid_argument("fireworks_tail_class: law has no tail descriptor");
  }
  rep.classification = Classification::inconclusive;
  rep.criterion = "tail-limit-indeterminate";
  return rep;
}

enum class SpreaderRegime { geometric, power_log, exact_harmonic, heavy_power };

// Upper bounds on P(M >= k) for the final spreader count M of the direct
// process. The calibration constant covers regimes whose sources assert
// existence of C only; it is fitted against an exhaustive small-instance
// oracle in the tests.
inline double spreader_tail_bound(const Law& R, SpreaderRegime regime, int64_t k,
                                  double calibration = 1.0) {
  detail::require(k >= 1, "spreader_tail_bound: k must be >= 1");
  const Decay& d = R.decay();
  double kd = static_cast<double>(k);
  switch (regime) {
    case SpreaderRegime::geometric: {
      detail::require(d.kind == Decay::Kind::geometric,
                      "spreader tail: geometric regime needs a geometric tail");
      double r = d.rate;
      double Cr = d.coeff_hi * r;  // P(R > k) <= coeff_hi r^{k+1} = Cr r^k
      detail::require(Cr > 0.0 && Cr < std::log(1.0 / r),
                      "spreader tail: constant outside (0, log(1/r))");
      return std::min(1.0, std::pow(std::exp(Cr) * r, kd) / Cr);
    }
    case SpreaderRegime::power_log: {
      detail::require(d.kind == Decay::Kind::power && d.exponent > 1.0,
                      "spreader tail: power regime needs exponent > 1");
      detail::require(k >= 2 || d.log_exp == 0.0,
                      "spreader tail: k must be >= 2 with log factors");
      return std::min(1.0, calibration * std::pow(std::log(kd), -d.log_exp) *
                               std::pow(kd, -d.exponent));
    }
    case SpreaderRegime::exact_harmonic: {
      // hypothesis P(R > k) = r/k exactly, i.e. tail(m) = r/(m-1)
      bool exact = d.kind == Decay::Kind::power && d.exponent == 1.0 &&
                   d.log_exp == 0.0 && d.has_shift_envelope &&
                   d.shift_lo == d.shift_hi && d.shift_lo == -1.0;
      detail::require(exact && d.coeff > 0.0 && d.coeff < 1.0,
                      "spreader tail: harmonic regime needs tail exactly r/(k-1), r in (0,1)");
      detail::require(k >= 2, "spreader tail: k must be >= 2 here");
      double r = d.coeff;
      double expo = 2.0 - (1.0 + r) * (1.0 + r);
      return std::min(1.0, calibration * std::pow(std::log(kd), 3.0 + r) / std::pow(kd, expo));
    }
    case SpreaderRegime::heavy_power: {
      detail::require(d.kind == Decay::Kind::power && d.exponent > 0.5 && d.exponent < 1.0 &&
                          d.log_exp == 0.0,
                      "spreader tail: heavy regime needs exponent in (1/2, 1)");
      return std::min(1.0, calibration / std::pow(kd, 1.0 - d.exponent));
    }
  }
  return 1.0;
}

// Reverse process on N: survives a.s. iff E(R) = inf, except for the
// degenerate relay P(R >= 1) = 1 where every vertex joins outright.
inline SurvivalReport reverse_survival_class(const Law& R) {
  SurvivalReport rep;
  if (R.cdf(0) == 0.0) {
    rep.classification = Classification::survives_as;
    rep.criterion = "immediate-relay";
    rep.probability = 1.0;
    rep.note = "P(R >= 1) = 1: the mean dichotomy presumes P(R = 0) > 0";
    return rep;
  }
  SeriesValue mean = R.mean();
  if (mean.infinite) {
    rep.classification = Classification::survives_as;
    rep.criterion = "infinite-mean-radius";
    rep.probability = 1.0;
    return rep;
  }
  if (!std::isnan(mean.value)) {
    rep.classification = Classification::dies_as;
    rep.criterion = "finite-mean-radius";
    rep.probability = 0.0;
    return rep;
  }
  rep.classification = Classification::inconclusive;
  rep.criterion = "mean-unclassifiable";
  return rep;
}

struct GeometricFinalLaw {
  double p = 0.0;
  double remainder = 0.0;
};

// Parameter of the final spreader-count law Z ~ Geometric(p) for the
// reverse process, p = prod_{k>=0} P(R <= k). Requires E(R) < inf.
inline GeometricFinalLaw reverse_final_law(const Law& R, double tol = 1e-12) {
  SeriesValue mean = R.mean();
  detail::require(!mean.infinite && !std::isnan(mean.value),
                  "reverse_final_law: requires a certified finite mean");
  // a zero factor would force p = 0, i.e. an improper final law
  detail::require(R.cdf(0) > 0.0, "reverse_final_law: P(R <= 0) = 0 makes p = 0");

  // stop when the un-multiplied factors can move ln p by < tol:
  // sum_{k>K} -ln(cdf(k)) <= 1.5 sum_{k>K} tail(k+1), bounded via the decay
  const Decay& d = R.decay();
  double logp = 0.0;
  double rem_tail = 0.0;
  int64_t K = 0;
  for (;; ++K) {
    double t = R.tail(K + 1);
    if (K > std::max<int64_t>(d.valid_from, 4) && t < 0.5) {
      switch (d.kind) {
        case Decay::Kind::bounded: rem_tail = K >= d.support_max ? 0.0 : kInf; break;
        case Decay::Kind::geometric:
          rem_tail = d.coeff_hi * std::pow(d.rate, static_cast<double>(K + 2)) / (1.0 - d.rate);
          break;
        case Decay::Kind::power:
          rem_tail = d.exponent > 1.0 ? d.coeff_hi *
                                            std::pow(static_cast<double>(K + 1), 1.0 - d.exponent) /
                                            (d.exponent - 1.0)
                                      : kInf;
          break;
        default: rem_tail = kInf;
      }
      if (1.5 * rem_tail < tol || K > (1 << 24)) break;
    }
    logp += std::log1p(-t);
  }
  GeometricFinalLaw out;
  double pK = std::exp(logp);
  double slack = 1.5 * rem_tail;  // p in [pK e^{-slack}, pK]
  out.p = pK * (1.0 - 0.5 * slack);
  out.remainder = pK * (0.6 * slack) + 1e-14;
  return out;
}

// mu = 1 + sum_j a_j and sigma^2 = sum_k k^2 P(R >= k) a_{k-1} - mu^2 for
// the reverse spreader proportion; density = 1/mu.
inline DensityConstants spreader_density(const Law& R, double tol = 1e-12) {
  DensityConstants out;
  ProductSeriesResult series = fireworks_series(R, tol);
  if (series.divergent) {
    out.mu = kInf;
    out.density = 0.0;
    out.sigma2 = kInf;
    return out;
  }
  detail::require(series.convergent, "spreader_density: series inconclusive");
  out.mu = 1.0 + series.sum;
  out.mu_remainder = series.remainder;
  out.density = 1.0 / out.mu;

  const Decay& d = R.decay();
  bool rational = d.kind == Decay::Kind::power && d.exponent == 1.0 && d.log_exp == 0.0 &&
                  d.has_shift_envelope;
  if (R.cdf(0) == 0.0) {
    // degenerate relay: every vertex is a spreader, Z(n) = n
    out.mu = 1.0;
    out.density = 1.0;
    out.sigma2 = 0.0;
    return out;
  }
  if (!rational || d.coeff <= 2.0) {
    // second-moment series needs a_k ~ k^-c with c > 2; otherwise it
    // diverges (c <= 2) or we have no closed tail control (stretched case
    // converges but is handled numerically below only for rational tails)
    if (rational || (d.kind == Decay::Kind::power && d.exponent < 1.0)) {
      if (d.kind == Decay::Kind::power && d.exponent < 1.0 && d.coeff_lo > 0.0) {
        // stretched-exponential a_k: sum k^2 tail(k) a_{k-1} numerically,
        // remainder via the same doubling-block closure with factor 8
        NeumaierSum acc;
        double ak = 1.0;  // a_{k-1}, starts at a_0 = 1
        double rem = kInf;
        for (int64_t k = 1; k < (1 << 22); ++k) {
          double kd = static_cast<double>(k);
          acc.add(kd * kd * R.tail(k) * ak);
          ak *= R.cdf(k - 1);  // becomes a_k
          if (k > d.valid_from) {
            double block_ratio = 8.0 * std::exp(-d.coeff_lo *
                                                std::pow(kd, 1.0 - d.exponent) *
                                                std::pow(2.0, -d.exponent));
            if (block_ratio <= 0.5) {
              rem = 2.0 * kd * kd * kd * ak;
              if (rem < tol) break;
            }
          }
        }
        double second = acc.value();
        out.sigma2 = second - out.mu * out.mu;
        out.sigma2_remainder = rem + 2.0 * out.mu * out.mu_remainder;
        return out;
      }
      out.sigma2 = kInf;
      return out;
    }
    out.sigma2 = kInf;
    return out;
  }

  double c = d.coeff, s_lo = d.shift_lo, s_hi = d.shift_hi;
  int64_t J = std::max<int64_t>(d.valid_from + 8, 4096);
  NeumaierSum acc;
  double ak = 1.0;  // a_{k-1}
  for (int64_t k = 1; k < J; ++k) {
    double kd = static_cast<double>(k);
    acc.add(kd * kd * R.tail(k) * ak);
    ak *= R.cdf(k - 1);
  }
  // tail sum_{k>=J} k^2 tail(k) a_{k-1}, with k^2/(k+s) = k - s + s^2/(k+s):
  // bracket using the pure model at both envelope shifts
  auto tail_piece = [&](double s_prod, double s_tail) {
    double bJ = ak;  // a_{J-1} plays b_{J-1} in the pure model
    double U = detail::pure_product_tail_weighted(bJ, J - 1, c, s_prod);
    double T = detail::pure_product_tail(bJ, J - 1, c, s_prod);
    double main = (U + T) - s_tail * T;  // sum (k - s) a_{k-1}, k = m+1
    double third_hi = s_tail * s_tail * T / (static_cast<double>(J) + s_tail);
    return std::pair<double, double>(c * main, c * (main + third_hi));
  };
  auto lo_pair = tail_piece(s_lo, s_hi);  // smaller products, larger shift in tail
  auto hi_pair = tail_piece(s_hi, s_lo);
  double t_lo = std::min(std::min(lo_pair.first, lo_pair.second),
                         std::min(hi_pair.first, hi_pair.second));
  double t_hi = std::max(std::max(lo_pair.first, lo_pair.second),
                         std::max(hi_pair.first, hi_pair.second));
  double second = acc.value() + 0.5 * (t_lo + t_hi);
  out.sigma2 = second - out.mu * out.mu;
  out.sigma2_remainder =
      0.5 * (t_hi - t_lo) + 2.0 * (out.mu + 1.0) * out.mu_remainder + 1e-12;
  return out;
}

// ---------------------------------------------------------------------
// Heterogeneous criteria.

// Direct process with per-position laws, actionable gaps <= m. Evaluates
// the summability criterion at power t, the infinite-product lower bound,
// and the vanishing upper bound on P(V_n).
inline SurvivalReport hetero_fireworks_bound(const SequenceLaw& seq, int64_t m, int64_t t,
                                             double tol = 1e-12) {
  (void)tol;
  detail::require(m >= 1 && t >= 1, "hetero_fireworks_bound: m, t >= 1");
  SurvivalReport rep;

  // death route: P(V_n) <= sum_{k<n} P(R_k >= n-k) (positions only stretch
  // the right side further); vanishing liminf kills survival
  switch (seq.kind()) {
    case SequenceLaw::Kind::profile:
      if (seq.bseq().limit_n_times() == 0.0) {
        rep.classification = Classification::dies_as;
        rep.criterion = "vanishing-reach-bound";
        rep.probability = 0.0;
        rep.note = "sum_k P(R_k >= n-k) = n b_{n-1} -> 0";
        return rep;
      }
      break;
    case SequenceLaw::Kind::spike:
      if (seq.bseq().window_sum_limit() == 0.0) {
        rep.classification = Classification::dies_as;
        rep.criterion = "vanishing-reach-bound";
        rep.probability = 0.0;
        rep.note = "sum_k P(R_k >= n-k) collapses to a window sum of b -> 0";
        return rep;
      }
      break;
    case SequenceLaw::Kind::constant:
      if (m == 1) {
        SurvivalReport homog = fireworks_tail_class(seq.constant_law());
        if (homog.classification == Classification::dies_as) {
          homog.note = "constant sequence: homogeneous tail-limit classification";
          return homog;
        }
      }
      break;
    default: break;
  }

  // summability criterion: sum_n [P(R_n < t m)]^t < inf
  bool sum_certified = false;
  {
    int64_t q = t * m;
    switch (seq.kind()) {
      case SequenceLaw::Kind::constant:
        sum_certified = seq.constant_law().cdf(q - 1) == 0.0;
        break;
      case SequenceLaw::Kind::bernoulli:
        sum_certified = (q == 1) && !seq.bseq().sum().infinite;
        break;
      case SequenceLaw::Kind::alternating:
        sum_certified = seq.law_at(0).cdf(q - 1) == 0.0 && seq.law_at(1).cdf(q - 1) == 0.0;
        break;
      default: break;  // profile/spike terms tend to 1: series diverges
    }
  }

  // product lower bound: P(V) >= prod_j [1 - q_j],
  // q_j = prod_{i=0}^{j} P(R_{j-i} < (i+1) m)
  const int64_t J = 2048;
  double log_bound = 0.0;
  bool degenerate_zero = false;
  double q_last = 0.0;
  for (int64_t j = 0; j < J; ++j) {
    double qj = 1.0;
    for (int64_t i = 0; i <= j && qj > 0.0; ++i) {
      qj *= seq.cdf_at(j - i, (i + 1) * m - 1);
      if (qj < 1e-300) qj = 0.0;
    }
    q_last = qj;
    if (qj >= 1.0) {
      degenerate_zero = true;
      break;
    }
    log_bound += std::log1p(-qj);
  }
  double bound = degenerate_zero ? 0.0 : std::exp(log_bound);

  // remainder on the unevaluated factors, kind by kind
  double q_tail_sum = kInf;
  switch (seq.kind()) {
    case SequenceLaw::Kind::bernoulli:
      if (m == 1) {
        SeriesValue s = seq.bseq().sum_from(J);
        if (!s.infinite) q_tail_sum = s.value + s.remainder;
      }
      break;
    case SequenceLaw::Kind::alternating:
      if (seq.law_at(0).cdf(m - 1) == 0.0 && seq.law_at(1).cdf(m - 1) == 0.0) q_tail_sum = 0.0;
      break;
    case SequenceLaw::Kind::constant:
      if (seq.constant_law().cdf(m - 1) == 0.0) {
        // the i = 0 factor of every q_j is structurally zero
        q_tail_sum = 0.0;
      } else if (m == 1 && !degenerate_zero) {
        // q_j = a_{j+1} of the homogeneous survival product; the unseen
        // factors sum to sum_{j'>J} a_{j'}
        const Law& law = seq.constant_law();
        const Decay& d = law.decay();
        if (q_last == 0.0) {
          q_tail_sum = 0.0;
        } else if (d.kind == Decay::Kind::power && d.exponent == 1.0 && d.log_exp == 0.0) {
          double c = d.has_shift_envelope ? d.coeff : d.coeff_lo;
          double sh = d.has_shift_envelope ? d.shift_hi : 0.0;
          if (c > 1.0 && J > d.valid_from) {
            double aJ1 = q_last * law.cdf(J);  // a_{J+1}
            q_tail_sum = detail::pure_product_tail(aJ1, J + 1, c, sh);
          }
        } else if (d.kind == Decay::Kind::power && d.exponent < 1.0 && d.coeff_lo > 0.0) {
          double block_ratio =
              2.0 * std::exp(-d.coeff_lo * std::pow(static_cast<double>(J), 1.0 - d.exponent) *
                             std::pow(2.0, -d.exponent));
          if (J > d.valid_from && block_ratio <= 0.5) {
            q_tail_sum = 2.0 * static_cast<double>(J) * q_last;
          }
        }
      }
      break;
    default: break;
  }

  if (sum_certified) {
    rep.classification = Classification::survives_pos_prob;
    rep.criterion = "threshold-power-series";
    if (!degenerate_zero && std::isfinite(q_tail_sum)) {
      rep.bound_low = bound * std::max(0.0, 1.0 - q_tail_sum);
      rep.bound_high = 1.0;
      rep.remainder_bound = bound * q_tail_sum;
      if (*rep.bound_low >= 1.0) {
        rep.classification = Classification::survives_as;
        rep.probability = 1.0;
      }
    }
    return rep;
  }

  if (!degenerate_zero && std::isfinite(q_tail_sum)) {
    double lo = bound * std::max(0.0, 1.0 - q_tail_sum);
    rep.bound_low = lo;
    rep.bound_high = 1.0;
    rep.remainder_bound = bound * q_tail_sum;
    if (lo >= 1.0) {
      rep.classification = Classification::survives_as;
      rep.probability = 1.0;
      rep.criterion = "stall-product-bound";
      return rep;
    }
    if (lo > 0.0) {
      rep.classification = Classification::survives_pos_prob;
      rep.criterion = "stall-product-bound";
      return rep;
    }
  }

  rep.classification = Classification::inconclusive;
  rep.criterion = "prefix-undecided";
  rep.note = "probe product bound " + detail::fmt_num(bound) + " lacks a certified remainder";
  return rep;
}

// Reverse process with per-position laws. Survives a.s. iff
// sum_k P(R_{n+k} >= k) = inf for every n; positive survival via
// sum_n prod_k P(R_{n+k} < k) < inf; death via a dominating radius law
// with finite mean and P(R = 0) > 0.
inline SurvivalReport hetero_reverse_class(const SequenceLaw& seq, double tol = 1e-12,
                                           int64_t probe_n = 64) {
  (void)tol;
  SurvivalReport rep;
  switch (seq.kind()) {
    case SequenceLaw::Kind::constant: {
      rep = reverse_survival_class(seq.constant_law());
      rep.note = "constant sequence: homogeneous classification";
      return rep;
    }
    case SequenceLaw::Kind::alternating: {
      if (seq.law_at(0).literal() == seq.law_at(1).literal()) {
        rep = reverse_survival_class(seq.law_at(0));
        rep.note = "alternating with equal laws: homogeneous classification";
        return rep;
      }
      SeriesValue m0 = seq.law_at(0).mean(), m1 = seq.law_at(1).mean();
      if (m0.infinite || m1.infinite) {
        rep.classification = Classification::survives_as;
        rep.criterion = "divergent-hearing-series";
        rep.probability = 1.0;
        rep.note = "one parity class alone contributes an infinite tail sum";
        return rep;
      }
      if (!std::isnan(m0.value) && !std::isnan(m1.value)) {
        double t1 = std::max(seq.law_at(0).tail(1), seq.law_at(1).tail(1));
        if (t1 < 1.0) {
          rep.classification = Classification::dies_as;
          rep.criterion = "dominating-finite-mean-coupling";
          rep.probability = 0.0;
          return rep;
        }
      }
      break;
    }
    case SequenceLaw::Kind::spike: {
      SeriesValue s = seq.bseq().sum();
      if (s.infinite) {
        // P(R_{n+k} >= k) = b_{n+k}; divergence for every n at once
        rep.classification = Classification::survives_as;
        rep.criterion = "divergent-hearing-series";
        rep.probability = 1.0;
        return rep;
      }
      // dominated by tail*(k) = b_k with finite mean and b_1 < 1
      rep.classification = Classification::dies_as;
      rep.criterion = "dominating-finite-mean-coupling";
      rep.probability = 0.0;
      return rep;
    }
    case SequenceLaw::Kind::profile: {
      SeriesValue s = seq.bseq().sum();
      if (s.infinite) {
        // sum_k b_{n+2k-1} >= half the tail of a divergent series
        rep.classification = Classification::survives_as;
        rep.criterion = "divergent-hearing-series";
        rep.probability = 1.0;
        return rep;
      }
      rep.classification = Classification::dies_as;
      rep.criterion = "dominating-finite-mean-coupling";
      rep.probability = 0.0;
      return rep;
    }
    case SequenceLaw::Kind::bernoulli: {
      SeriesValue s = seq.bseq().sum();
      if (!s.infinite) {
        // prod_k P(R_{n+k} < k) = b_{n+1}; outer sum finite
        rep.classification = Classification::survives_pos_prob;
        rep.criterion = "stall-product-series";
        return rep;
      }
      rep.classification = Classification::inconclusive;
      rep.criterion = "hearing-series-finite";
      rep.note = "sum_k P(R_{n+k} >= k) < inf for each n, so P(S) < 1";
      return rep;
    }
  }
  // generic probe: report the first undecided n
  for (int64_t n = 0; n <= probe_n; ++n) {
    double probe = 0.0;
    for (int64_t k = 1; k <= 4096; ++k) probe += seq.tail_at(n + k, k);
    if (probe < 1.0) break;
  }
  rep.classification = Classification::inconclusive;
  rep.criterion = "prefix-undecided";
  return rep;
}

}  // namespace rumor

#endif  // RUMOR_LINE_HPP
