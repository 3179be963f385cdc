#ifndef RUMOR_ENV_HPP
#define RUMOR_ENV_HPP

// Sites with a random number of identical stations. The reach of a site is
// the best of N independent radius draws (zero when the site hosts no
// station), so every homogeneous question about the pair (N, R) is a
// question about that annealed radius. Its tail is A(k) = 1 - E[P(R < k)^N],
// evaluated by Law::omp against the radius tail. When E(N) is finite the
// composed descriptor of annealed_radius() is a scaled copy of the radius
// envelope and the homogeneous machinery applies unchanged; heavier station
// counts pick up slowly varying factors that no scaled envelope captures,
// and the classifiers below work from the two raw descriptors instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rumor/law.hpp"
#include "rumor/line.hpp"
#include "rumor/numeric.hpp"
#include "rumor/report.hpp"
#include "rumor/rootfind.hpp"
#include "rumor/seq.hpp"

namespace rumor {

namespace detail {

// Heavy station tails push the generic transform evaluation toward 1/t
// terms, so probes below this floor are cut off for power/unknown shapes.
inline double station_probe_floor(const Law& stations) {
  Decay::Kind k = stations.decay().kind;
  return (k == Decay::Kind::power || k == Decay::Kind::unknown) ? 1e-5 : 0.0;
}

// omp(t)/t is non-increasing (concavity through the origin), so the slope
// measured at the deepest affordable positive tail point bounds every
// shallower one from below. Returns 0 when no anchor exists.
inline double station_slope_floor(const Law& stations, const Law& radius) {
  double t_min = station_probe_floor(stations);
  double t_deep = 0.0;
  for (int64_t k = std::max<int64_t>(radius.decay().valid_from, 1); k <= (1 << 14); k *= 2) {
    double t = radius.tail(k);
    if (!(t > 0.0) || t < t_min) break;
    t_deep = t;
  }
  if (t_deep <= 0.0) return 0.0;
  return stations.omp(t_deep) / t_deep;
}

// Upper control of the annealed tail under at-worst-harmonic station tails:
// P(N >= m) <= ch/m for m >= v gives, with m = ceil(1/t) and
// E[min(N, m)] = sum_{j<=m} P(N >= j),
//   A(t) <= t E[min(N, m)] + P(N > m) <= t (head + ch (3 + ln(1/t)))
// valid whenever 1/t >= v. A log factor is the whole price of E(N) = inf.
struct StationLift {
  bool usable = false;
  double head = 0.0;  // exact sum of P(N >= j) below the envelope start
  double ch = 0.0;
  int64_t v = 2;

  double bound(double t) const {
    if (!(t > 0.0)) return 0.0;
    if (t * static_cast<double>(v) > 1.0) return 1.0;
    return t * (head + ch * (3.0 + std::log(1.0 / t)));
  }
};

inline StationLift harmonic_station_lift(const Law& stations) {
  const Decay& d = stations.decay();
  StationLift out;
  if (d.kind != Decay::Kind::power || d.exponent != 1.0 || d.log_exp < 0.0 ||
      d.loglog_exp < 0.0 || !std::isfinite(d.coeff_hi))
    return out;
  out.usable = true;
  out.ch = d.coeff_hi;
  out.v = std::max<int64_t>(d.valid_from, 2);
  NeumaierSum head;
  for (int64_t j = 1; j < out.v; ++j) head.add(stations.tail(j));
  out.head = head.value();
  return out;
}

// limsup n A(n) under the harmonic station lift: n t (3 + ln(1/t)) with t
// running through the radius envelope. One log order is consumed, so the
// radius needs a spare one; on the exact boundary the limit is the product
// of the two harmonic coefficients.
inline double lifted_n_tail_limsup(const StationLift& lift, const Decay& dr) {
  if (!lift.usable || !std::isfinite(dr.coeff_hi)) return kInf;
  if (dr.kind == Decay::Kind::geometric && dr.rate < 1.0) return 0.0;
  if (dr.kind == Decay::Kind::power) {
    if (dr.exponent > 1.0) return 0.0;
    if (dr.exponent == 1.0) {
      if (dr.log_exp > 1.0) return 0.0;
      if (dr.log_exp == 1.0 && dr.loglog_exp > 0.0) return 0.0;
      if (dr.log_exp == 1.0 && dr.loglog_exp == 0.0) return lift.ch * dr.coeff_hi;
    }
  }
  return kInf;
}

// sum_n t ln(1/t) over the radius envelope converges when one log order is
// left after paying for the station lift.
inline bool lifted_tail_summable(const StationLift& lift, const Decay& dr) {
  if (!lift.usable || !std::isfinite(dr.coeff_hi)) return false;
  if (dr.kind == Decay::Kind::geometric && dr.rate < 1.0) return true;
  if (dr.kind == Decay::Kind::power) {
    if (dr.exponent > 1.0) return true;
    if (dr.exponent == 1.0 &&
        (dr.log_exp > 2.0 || (dr.log_exp == 2.0 && dr.loglog_exp > 1.0)))
      return true;
  }
  return false;
}

// Lower control of the annealed tail under log-harmonic station tails,
// P(N >= m) >= cl/ln m: choosing a in P(N >= a)(1 - P(R<n)^a) with
// P(R<n)^a = 1 - delta gives A(n) >= delta P(N >= ceil(a_n)) and
// a_n <= ln(1/(1-delta))/t_n. Against a geometric radius ln a_n grows like
// n ln(1/r) and the constant ln(1/(1-delta)) washes out, so the floor holds
// for every delta < 1 at once; against a power radius ln a_n only grows
// like ln n and the floor n/ln n runs away. Returns liminf n A(n).
inline double log_station_floor(const Decay& dn, const Decay& dr) {
  if (!(dn.kind == Decay::Kind::power && dn.exponent == 0.0 && dn.log_exp == 1.0 &&
        dn.loglog_exp == 0.0 && dn.coeff_lo > 0.0))
    return 0.0;
  if (dr.kind == Decay::Kind::geometric && dr.rate > 0.0 && dr.rate < 1.0 &&
      dr.coeff_lo > 0.0)
    return dn.coeff_lo / std::log(1.0 / dr.rate);
  if (dr.kind == Decay::Kind::power && dr.coeff_lo > 0.0) return kInf;
  return 0.0;
}

// sum_{n>K} (alpha + beta n) x^n for x in (0,1).
inline double geom_poly_tail(double x, int64_t K, double alpha, double beta) {
  double xk = std::pow(x, static_cast<double>(K) + 1.0);
  double head = (alpha + beta * (static_cast<double>(K) + 1.0)) / (1.0 - x);
  return xk * (head + beta * x / ((1.0 - x) * (1.0 - x)));
}

// Certified sum_{n>=1} A(n) t^n when the radius envelope is geometric and
// the stations are at worst harmonic: terms are below (alpha + beta n) x^n
// with x = rate * t once the lift is valid.
inline SeriesValue lifted_power_series(const Law& stations, const Law& radius,
                                       const StationLift& lift, double t) {
  const Decay& dr = radius.decay();
  if (!lift.usable || dr.kind != Decay::Kind::geometric || !(dr.rate < 1.0) ||
      !std::isfinite(dr.coeff_hi))
    return {kNaN, kInf, false};
  double x = dr.rate * t;
  if (x >= 1.0) return {kNaN, kInf, false};
  // start of the majorant: envelope valid and coeff_hi * r^n <= 1/v
  int64_t start = std::max<int64_t>(dr.valid_from, 1);
  while (dr.coeff_hi * std::pow(dr.rate, static_cast<double>(start)) *
             static_cast<double>(lift.v) >
         1.0)
    ++start;
  double ch = dr.coeff_hi;
  double alpha = ch * (lift.head + lift.ch * (3.0 + std::log(1.0 / ch)));
  double beta = ch * lift.ch * std::log(1.0 / dr.rate);
  double t_min = station_probe_floor(stations);
  NeumaierSum acc;
  double tn = t;
  int64_t n = 1;
  double rem = kInf;
  for (;; ++n) {
    double tr = radius.tail(n);
    bool affordable = !(tr > 0.0 && tr < t_min);
    if (n > start) {
      rem = geom_poly_tail(x, n - 1, alpha, beta);
      if (rem < 1e-13 * (1.0 + std::abs(acc.value())) || n > (1 << 22) || !affordable) break;
    } else if (!affordable) {
      return {kNaN, kInf, false};  // majorant not yet valid where probes end
    }
    acc.add(stations.omp(tr) * tn);
    tn *= t;
  }
  return {acc.value(), rem, false};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Homogeneous random environment on the half-line.

// Direct spread: classification of liminf/limsup of n A(n), the tail
// criterion of the annealed radius. Survival needs the floor above 1,
// extinction the ceiling below 1.
inline SurvivalReport env_line_criteria(const Law& stations, const Law& radius) {
  SurvivalReport rep;
  double stall = stations.pgf_point(radius.cdf(0));
  if (stall <= 0.0) {
    rep.classification = Classification::survives_as;
    rep.criterion = "immediate-relay";
    rep.probability = 1.0;
    rep.note = "every site reaches its neighbour; the tail criteria presume a positive stall";
    return rep;
  }
  if (stall >= 1.0) {
    rep.classification = Classification::dies_as;
    rep.criterion = "zero-reach";
    rep.probability = 0.0;
    return rep;
  }

  const Decay& dn = stations.decay();
  const Decay& dr = radius.decay();
  SeriesValue en = stations.mean();
  bool en_ok = !en.infinite && !std::isnan(en.value);

  // floor for liminf n A(n): station slope against the radius tail, or the
  // log-station lift when the mean diverges
  double lo = 0.0;
  double nt_lo = detail::n_tail_liminf(dr);
  double slope = detail::station_slope_floor(stations, radius);
  if (nt_lo > 0.0 && slope > 0.0) lo = nt_lo * slope;
  lo = std::max(lo, detail::log_station_floor(dn, dr));

  // ceiling for limsup n A(n): chord slope E(N), or the harmonic lift
  double hi_mean = kInf;
  if (en_ok) {
    double u = detail::n_tail_limsup(dr);
    hi_mean = u == 0.0 ? 0.0 : (en.value + en.remainder) * u;
  }
  detail::StationLift lift = detail::harmonic_station_lift(stations);
  double hi_lift = detail::lifted_n_tail_limsup(lift, dr);
  double hi = std::min(hi_mean, hi_lift);

  if (lo > 1.0 + 1e-11) {
    rep.classification = Classification::survives_pos_prob;
    rep.criterion = "station-boosted-tail-supercritical";
    rep.note = "liminf n A(n) >= " + detail::fmt_num(lo);
    return rep;
  }
  if (hi < 1.0 - 1e-11) {
    rep.classification = Classification::dies_as;
    rep.criterion =
        hi_mean <= hi_lift ? "station-weighted-tail-subcritical" : "station-log-boost-vanishing";
    rep.probability = 0.0;
    rep.note = "limsup n A(n) <= " + detail::fmt_num(hi);
    return rep;
  }
  SeriesValue er = radius.mean();
  if (en_ok && !er.infinite && !std::isnan(er.value)) {
    rep.classification = Classification::dies_as;
    rep.criterion = "finite-station-and-radius-means";
    rep.probability = 0.0;
    return rep;
  }
  rep.classification = Classification::inconclusive;
  rep.criterion = "criteria-silent";
  double t_min = detail::station_probe_floor(stations);
  std::string probes;
  for (int64_t n : {4, 32, 256, 2048}) {
    double t = radius.tail(n);
    if (t > 0.0 && t < t_min) break;
    if (!probes.empty()) probes += ", ";
    probes += detail::fmt_num(static_cast<double>(n) * stations.omp(t));
  }
  rep.note = "n A(n) probes: " + (probes.empty() ? std::string("unavailable") : probes);
  return rep;
}

// Direct spread, exact survival probability: the series
// S = sum_{j>=1} prod_{i=0}^{j-1} E[P(R <= i)^N] gives P(V) = 1/(1 + S),
// zero exactly when the series is proven divergent.
inline SurvivalReport env_fireworks_survival(const Law& stations, const Law& radius,
                                             double tol = 1e-12) {
  SurvivalReport rep;
  double g0 = stations.pgf_point(radius.cdf(0));
  if (g0 <= 0.0) {
    rep.classification = Classification::survives_as;
    rep.criterion = "immediate-relay";
    rep.probability = 1.0;
    rep.remainder_bound = 0.0;
    return rep;
  }
  Law ann = annealed_radius(stations, radius);
  const Decay& da = ann.decay();

  SeriesValue w = ann.mean();
  if (!w.infinite && !std::isnan(w.value)) {
    // annealed tails summable: the partial products stay bounded away from 0
    rep.classification = Classification::dies_as;
    rep.criterion = "finite-annealed-mean";
    rep.probability = 0.0;
    rep.remainder_bound = 0.0;
    return rep;
  }

  if (da.kind == Decay::Kind::power && da.exponent == 1.0 && da.log_exp > 0.0 &&
      std::isfinite(da.coeff_hi)) {
    // ln(1/a_j) grows slower than every eps ln j: the series diverges
    rep.classification = Classification::dies_as;
    rep.criterion = "slowly-varying-annealed-tail";
    rep.probability = 0.0;
    return rep;
  }

  if (da.kind == Decay::Kind::power && da.exponent == 1.0 && da.log_exp == 0.0 &&
      da.loglog_exp == 0.0) {
    double c_lo = da.has_shift_envelope ? da.coeff : da.coeff_lo;
    double c_hi = da.has_shift_envelope ? da.coeff : da.coeff_hi;
    double s_lo = da.has_shift_envelope ? da.shift_lo : 0.0;
    double s_hi = da.has_shift_envelope ? da.shift_hi : 0.0;
    if (c_hi <= 1.0) {
      rep.classification = Classification::dies_as;
      rep.criterion = "annealed-harmonic-coefficient-at-most-1";
      rep.probability = 0.0;
      return rep;
    }
    if (c_lo > 1.0) {
      // numeric prefix, then the pure-model bracket: the slow side of the
      // envelope bounds the unseen products from above, the fast side from
      // below
      double t_min = detail::station_probe_floor(stations);
      NeumaierSum acc;
      double aj = 1.0;
      int64_t j = 1, checkpoint = std::max<int64_t>(4 * da.valid_from, 4096);
      double t_hi = kInf, t_lo = 0.0;
      bool unaffordable = false;
      for (; j <= (1 << 20); ++j) {
        double tr = radius.tail(j);
        if (tr > 0.0 && tr < t_min) {
          unaffordable = true;
          break;
        }
        aj *= 1.0 - stations.omp(tr);
        acc.add(aj);
        if (j == checkpoint && j > da.valid_from) {
          double anext = aj * (1.0 - stations.omp(radius.tail(j + 1)));
          t_hi = detail::pure_product_tail(anext, j + 1, c_lo, s_hi);
          t_lo = std::isfinite(c_hi) ? detail::pure_product_tail(anext, j + 1, c_hi, s_lo) : 0.0;
          if (t_hi - t_lo < tol * (1.0 + acc.value())) break;
          checkpoint *= 2;
        }
      }
      if (unaffordable || !std::isfinite(t_hi)) {
        rep.classification = Classification::inconclusive;
        rep.criterion = "annealed-harmonic-coefficient-ambiguous";
        rep.note = "pure-tail bracket never became available";
        return rep;
      }
      double sum = acc.value() + 0.5 * (t_lo + t_hi);
      double remainder = 0.5 * (t_hi - t_lo) + 1e-14 * (1.0 + sum);
      double S = 1.0 + sum;
      rep.probability = 1.0 / S;
      rep.remainder_bound = remainder / (S * std::max(1.0, S - remainder));
      rep.bound_low = 1.0 / (S + remainder);
      rep.bound_high = 1.0 / std::max(1.0, S - remainder);
      rep.classification = *rep.probability >= 1.0 ? Classification::survives_as
                                                   : Classification::survives_pos_prob;
      rep.criterion = "annealed-rational-tail";
      return rep;
    }
    rep.classification = Classification::inconclusive;
    rep.criterion = "annealed-harmonic-coefficient-ambiguous";
    return rep;
  }

  if (da.kind == Decay::Kind::power && da.exponent < 1.0 && da.log_exp == 0.0 &&
      da.loglog_exp == 0.0 && da.coeff_lo > 0.0) {
    // stretched-exponential products: doubling blocks shrink geometrically
    // once 2 exp(-c_lo j^{1-a} 2^{-a}) <= 1/2
    double t_min = detail::station_probe_floor(stations);
    NeumaierSum acc;
    double aj = 1.0, rem = kInf;
    for (int64_t j = 1; j < (1 << 22); ++j) {
      double tr = radius.tail(j);
      if (tr > 0.0 && tr < t_min) break;
      aj *= 1.0 - stations.omp(tr);
      acc.add(aj);
      if (j > da.valid_from) {
        double block = 2.0 * std::exp(-da.coeff_lo *
                                      std::pow(static_cast<double>(j), 1.0 - da.exponent) *
                                      std::pow(2.0, -da.exponent));
        if (block <= 0.5) {
          rem = 2.0 * static_cast<double>(j) * aj;
          if (rem < tol) break;
        }
      }
    }
    if (!std::isfinite(rem)) {
      rep.classification = Classification::inconclusive;
      rep.criterion = "no-usable-annealed-descriptor";
      rep.note = "block-ratio certificate never engaged";
      return rep;
    }
    double S = 1.0 + acc.value() + 0.5 * rem;
    rep.probability = 1.0 / S;
    rep.remainder_bound = rem / (S * std::max(1.0, S - rem));
    rep.bound_low = 1.0 / (S + rem);
    rep.bound_high = 1.0 / std::max(1.0, S - rem);
    rep.classification = Classification::survives_pos_prob;
    rep.criterion = "annealed-stretched-exponential";
    return rep;
  }

  rep.classification = Classification::inconclusive;
  rep.criterion = "no-usable-annealed-descriptor";
  return rep;
}

// Listening spread: W = sum_{n>=0} A(n-th) diverges exactly when the
// annealed radius has infinite mean; the source then hears the rumor with
// probability one, otherwise with probability zero.
inline SurvivalReport env_reverse_W(const Law& stations, const Law& radius,
                                    double tol = 1e-12) {
  (void)tol;
  SurvivalReport rep;
  double stall = stations.pgf_point(radius.cdf(0));
  if (stall <= 0.0) {
    rep.classification = Classification::survives_as;
    rep.criterion = "immediate-relay";
    rep.probability = 1.0;
    rep.note = "every site reaches its neighbour; the mean dichotomy presumes a positive stall";
    return rep;
  }
  if (stall >= 1.0) {
    rep.classification = Classification::dies_as;
    rep.criterion = "zero-reach";
    rep.probability = 0.0;
    return rep;
  }

  const Decay& dn = stations.decay();
  const Decay& dr = radius.decay();
  double t_min = detail::station_probe_floor(stations);
  NeumaierSum partial;
  int64_t terms = 0;
  for (int64_t n = 0; n <= 4096; ++n) {
    double t = radius.tail(n);
    if (t > 0.0 && t < t_min) break;
    partial.add(stations.omp(t));
    terms = n + 1;
  }
  std::string w_note = "W over the first " + std::to_string(terms) +
                       " terms: " + detail::fmt_num(partial.value());

  // divergence: a positive station slope keeps an infinite radius mean, and
  // the log-station lift manufactures a harmonic annealed tail outright
  SeriesValue er = radius.mean();
  double slope = detail::station_slope_floor(stations, radius);
  if ((er.infinite && slope > 0.0) || detail::log_station_floor(dn, dr) > 0.0) {
    rep.classification = Classification::survives_as;
    rep.criterion = "infinite-annealed-mean";
    rep.probability = 1.0;
    rep.note = w_note;
    return rep;
  }

  // convergence: the composed descriptor, or the harmonic lift with a log
  // order to spare
  Law ann = annealed_radius(stations, radius);
  SeriesValue w = ann.mean();
  if (w.infinite) {
    rep.classification = Classification::survives_as;
    rep.criterion = "infinite-annealed-mean";
    rep.probability = 1.0;
    rep.note = w_note;
    return rep;
  }
  bool finite = !std::isnan(w.value);
  if (!finite) {
    detail::StationLift lift = detail::harmonic_station_lift(stations);
    finite = detail::lifted_tail_summable(lift, dr);
  }
  if (finite) {
    rep.classification = Classification::dies_as;
    rep.criterion = "finite-annealed-mean";
    rep.probability = 0.0;
    rep.note = w_note;
    return rep;
  }
  rep.classification = Classification::inconclusive;
  rep.criterion = "annealed-mean-unclassifiable";
  rep.note = w_note;
  return rep;
}

// ---------------------------------------------------------------------------
// Per-position environments.

enum class EnvProcess { fireworks, reverse };

// Criteria for position-dependent stations and radii. One report covers one
// process, so the direction is an explicit argument; constant environments
// reduce to the homogeneous classifiers above.
inline SurvivalReport env_hetero_criteria(const SequenceLaw& stations,
                                          const SequenceLaw& radii, EnvProcess process,
                                          double tol = 1e-12, int64_t probe_n = 64) {
  const char* series_flag =
      "; positive-survival series criterion read with a finite-sum comparator";
  if (stations.is_constant()) {
    const Law& N = stations.constant_law();
    if (N.literal() == "point:1") {
      // one station everywhere: the environment is the bare radius sequence
      SurvivalReport rep = process == EnvProcess::fireworks
                               ? hetero_fireworks_bound(radii, 1, 1, tol)
                               : hetero_reverse_class(radii, tol, probe_n);
      if (process == EnvProcess::fireworks &&
          rep.classification != Classification::dies_as &&
          rep.classification != Classification::inconclusive)
        rep.note += series_flag;
      return rep;
    }
    if (radii.is_constant()) {
      SurvivalReport rep = process == EnvProcess::fireworks
                               ? env_line_criteria(N, radii.constant_law())
                               : env_reverse_W(N, radii.constant_law(), tol);
      if (!rep.note.empty()) rep.note += "; ";
      rep.note += "constant environment: homogeneous classification";
      return rep;
    }

    double q0 = N.pmf(0);
    SeriesValue en = N.mean();
    bool en_ok = !en.infinite && !std::isnan(en.value);
    SurvivalReport rep;

    if (process == EnvProcess::reverse) {
      // hearing series sum_k A_{n+k}(k): a positive station slope preserves
      // divergence of the bare radius series
      SurvivalReport bare = hetero_reverse_class(radii, tol, probe_n);
      if (bare.classification == Classification::survives_as && N.tail(1) > 0.0) {
        rep.classification = Classification::survives_as;
        rep.criterion = "station-hearing-series-divergent";
        rep.probability = 1.0;
        rep.note = "a positive station count keeps the divergent hearing series";
        return rep;
      }
      if (radii.kind() == SequenceLaw::Kind::bernoulli) {
        SeriesValue b = radii.bseq().sum();
        if (!b.infinite && q0 <= 0.0) {
          // prod_k E[P(R_{n+k} < k)^N] = E[P(R_{n+1} = 0)^N] <= b_{n+1}
          rep.classification = Classification::survives_pos_prob;
          rep.criterion = "station-stall-product-series";
          rep.note = "summable stall products; the hearing series itself stays finite";
          return rep;
        }
      }
      if (bare.classification == Classification::dies_as && en_ok) {
        // per-position annealed tails dominated by E(N) times a finite-mean
        // envelope, with a positive stall left over
        rep.classification = Classification::dies_as;
        rep.criterion = "station-dominating-finite-mean";
        rep.probability = 0.0;
        return rep;
      }
      rep.classification = Classification::inconclusive;
      rep.criterion = "criteria-silent";
      return rep;
    }

    switch (radii.kind()) {
      case SequenceLaw::Kind::profile:
      case SequenceLaw::Kind::spike: {
        double limit = radii.kind() == SequenceLaw::Kind::profile
                           ? radii.bseq().limit_n_times()
                           : radii.bseq().window_sum_limit();
        if (limit == 0.0 && en_ok) {
          rep.classification = Classification::dies_as;
          rep.criterion = "station-vanishing-reach";
          rep.probability = 0.0;
          rep.note = "sum_k A_k(n - k) <= E(N) sum_k P(R_k >= n-k) -> 0";
          return rep;
        }
        break;
      }
      case SequenceLaw::Kind::bernoulli: {
        if (q0 > 0.0) {
          // every site is silent with probability at least P(N = 0) and the
          // reach never exceeds one step: some site in every prefix stalls
          rep.classification = Classification::dies_as;
          rep.criterion = "persistent-site-silence";
          rep.probability = 0.0;
          return rep;
        }
        SeriesValue b = radii.bseq().sum();
        if (!b.infinite) {
          // P(V) >= prod_n (1 - E[P(R_n = 0)^N]) with E[b_n^N] <= b_n
          double log_bound = 0.0;
          for (int64_t n = 0; n < 4096; ++n)
            log_bound += std::log1p(-N.pgf_point(radii.cdf_at(n, 0)));
          SeriesValue rest = radii.bseq().sum_from(4096);
          rep.classification = Classification::survives_pos_prob;
          rep.criterion = "station-stall-product-bound";
          rep.bound_low = std::exp(log_bound) *
                          std::max(0.0, 1.0 - (rest.value + rest.remainder));
          rep.bound_high = 1.0;
          rep.note = std::string("silent-site products stay positive") + series_flag;
          return rep;
        }
        break;
      }
      default:
        break;
    }
    rep.classification = Classification::inconclusive;
    rep.criterion = "criteria-silent";
    return rep;
  }

  SurvivalReport rep;
  rep.classification = Classification::inconclusive;
  rep.criterion = "criteria-silent";
  rep.note = "per-position station laws are supported through constant station sequences";
  return rep;
}

// ---------------------------------------------------------------------------
// Designed counterparts: one side of the pair is given, the other is built
// so the direct process survives.

enum class CounterpartDirection { stations_for_radius, radius_for_stations };

namespace detail {

inline Law design_stations_for_radius(const Law& radius, double eps, double delta) {
  require(eps > 0.0, "designed stations: eps must be positive");
  require(delta > 0.0 && delta < 1.0, "designed stations: delta outside (0,1)");
  require(radius.decay().kind != Decay::Kind::bounded,
          "designed stations: needs an unbounded radius law");

  // requirement level at distance n: P(R < n)^{a_n} = 1 - delta, so meeting
  // P(N >= a_n) >= (1+eps)/(n delta) forces n (1 - E[P(R<n)^N]) >= 1 + eps
  double L = std::log1p(-delta);  // negative
  auto level = [radius, L](int64_t n) -> double {
    double t = radius.tail(n);
    if (t >= 1.0) return 0.0;
    if (t <= 0.0) return kInf;
    return L / std::log1p(-t);
  };
  // levels are non-decreasing, so the first n reaching m is a bisection;
  // compare ceil(level) against m in doubles so the answer agrees with the
  // requirement check even past 2^53, where m - 1 is not representable
  auto first_n_at = [level](int64_t m) -> int64_t {
    double want = static_cast<double>(m);
    auto reached = [&](int64_t n) { return std::ceil(level(n)) >= want; };
    int64_t hi = 1;
    while (!reached(hi)) {
      hi *= 2;
      require(hi < (int64_t{1} << 56), "designed stations: requirement level saturates");
    }
    int64_t lo = hi / 2;  // not reached at lo, reached at hi, once lo >= 1
    while (hi - lo > 1 && lo >= 1) {
      int64_t mid = lo + (hi - lo) / 2;
      (reached(mid) ? hi : lo) = mid;
    }
    return hi;
  };
  auto tail_fn = [first_n_at, eps, delta](int64_t m) -> double {
    if (m <= 0) return 1.0;
    return std::min(1.0, (1.0 + eps) / (delta * static_cast<double>(first_n_at(m))));
  };

  Decay dec;  // unknown unless the radius envelope is geometric
  const Decay& dr = radius.decay();
  if (dr.kind == Decay::Kind::geometric && dr.rate > 0.0 && dr.rate < 1.0 &&
      dr.coeff_lo > 0.0 && std::isfinite(dr.coeff_hi)) {
    // ln(first_n_at(m)) = ln m / ln(1/r) + O(1): a log-harmonic station tail
    double lr = std::log(1.0 / dr.rate);
    double theta = 0.25;
    dec.kind = Decay::Kind::power;
    dec.exponent = 0.0;
    dec.log_exp = 1.0;
    dec.coeff_lo = (1.0 + eps) * lr / (delta * (1.0 + theta));
    dec.coeff_hi = (1.0 + eps) * lr / (delta * (1.0 - theta));
    int64_t k1 = std::max<int64_t>(dr.valid_from, 1);
    while (radius.tail(k1) >= 1.0) ++k1;
    double ts = radius.tail(k1);
    double C1 = std::max(1.0, dr.coeff_hi / (-L * (1.0 - ts)));
    dec.valid_from =
        std::max<int64_t>(16, static_cast<int64_t>(std::exp((std::log(C1) + lr) / theta)) + 1);
    require(dec.valid_from < (1 << 24), "designed stations: envelope start too deep");
    // the theta margins must absorb the ceil staircase; check a dyadic span
    for (int64_t m = dec.valid_from; m <= dec.valid_from * 1024; m *= 2) {
      double t = tail_fn(m), lm = std::log(static_cast<double>(m));
      require(t >= dec.coeff_lo / lm && t <= dec.coeff_hi / lm,
              "designed stations: envelope verification failed");
    }
  }

  // the displayed requirement holds by construction once the target is a
  // probability (n >= (1+eps)/delta); verify a prefix where the level still
  // casts to an exact integer
  for (int64_t n = 1; n <= 512; ++n) {
    double a = level(n);
    if (!(a >= 1.0) || !(a < 9.0e15)) continue;
    double target = std::min(1.0, (1.0 + eps) / (delta * static_cast<double>(n)));
    require(tail_fn(static_cast<int64_t>(std::ceil(a))) + 1e-12 >= target,
            "designed stations: requirement violated on the probe range");
  }
  return Law::from_tail_function(tail_fn, dec,
                                 "counterpart:stations(" + radius.literal() + ";" +
                                     fmt_num(eps) + "," + fmt_num(delta) + ")");
}

inline Law design_radius_for_stations(const Law& stations) {
  require(stations.pmf(0) < 1.0, "designed radius: needs stations with positive probability");
  double q0 = stations.pmf(0);
  auto memo = std::make_shared<std::map<int64_t, double>>();
  auto tail_fn = [stations, q0, memo](int64_t n) -> double {
    if (n <= 0) return 1.0;
    auto it = memo->find(n);
    if (it != memo->end()) return it->second;
    double thr = 1.0 - 2.0 / static_cast<double>(n);
    double p;
    if (q0 >= thr) {
      p = 1.0;  // even a certain hit cannot clear the bar this close in
    } else {
      // smallest t with E[(1-t)^N] <= thr: the pgf is continuous, decreasing
      double lo = 0.0, hi = 1.0;
      for (int it2 = 0; it2 < 80; ++it2) {
        double mid = 0.5 * (lo + hi);
        (stations.pgf_point(1.0 - mid) > thr ? lo : hi) = mid;
      }
      p = hi;
    }
    memo->emplace(n, p);
    return p;
  };

  // n (1 - E[P(R<n)^N]) = 2 on the solvable range: harmonic radius tails
  // with slopes of the station transform as envelope constants
  Decay dec;
  dec.kind = Decay::Kind::power;
  dec.exponent = 1.0;
  int64_t anchor = 256;
  double t_star = tail_fn(anchor);
  require(t_star < 1.0, "designed radius: anchor point still saturated");
  double slope = stations.omp(t_star) / t_star;
  dec.coeff_hi = 2.0 / slope;
  SeriesValue en = stations.mean();
  dec.coeff_lo = (!en.infinite && !std::isnan(en.value)) ? 2.0 / (en.value + en.remainder) : 0.0;
  dec.valid_from = anchor;

  for (int64_t n = 1; n <= 512; ++n) {
    double p = tail_fn(n);
    require(p >= 1.0 - 1e-12 || stations.omp(p) >= 2.0 / static_cast<double>(n) - 1e-9,
            "designed radius: clearing bar missed on the probe range");
  }
  return Law::from_tail_function(tail_fn, dec, "counterpart:radius(" + stations.literal() + ")");
}

}  // namespace detail

// Builds the missing half of a surviving pair: stations for an unbounded
// radius law (meeting P(N >= a_n) >= (1+eps)/(n delta)), or a radius for
// stations with P(N = 0) < 1 (clearing n A(n) = 2). The eps/delta knobs
// only steer the station direction.
inline Law design_counterpart(CounterpartDirection direction, const Law& given, double eps,
                              double delta) {
  if (direction == CounterpartDirection::stations_for_radius)
    return detail::design_stations_for_radius(given, eps, delta);
  return detail::design_radius_for_stations(given);
}

// ---------------------------------------------------------------------------
// Random environment on a supercritical branching tree.

struct EnvSpec {
  enum class Substrate { line, galton_watson };
  enum class RootStations { sampled, min_support };

  SequenceLaw stations;
  SequenceLaw radii;
  Substrate substrate = Substrate::line;
  std::optional<Law> offspring;
  RootStations root_rule = RootStations::min_support;

  static EnvSpec on_line(SequenceLaw stations, SequenceLaw radii) {
    EnvSpec s{std::move(stations), std::move(radii)};
    s.substrate = Substrate::line;
    return s;
  }
  static EnvSpec on_galton_watson(Law stations, Law radii, Law offspring,
                                  RootStations rule = RootStations::min_support) {
    SeriesValue mu = offspring.mean();
    detail::require(!std::isnan(mu.value),
                    "environment: offspring mean must be certified");
    detail::require(mu.infinite || mu.value - mu.remainder > 1.0,
                    "environment: offspring mean must exceed 1");
    detail::require(offspring.pmf(1) < 1.0, "environment: offspring must branch");
    EnvSpec s{SequenceLaw::constant(std::move(stations)),
              SequenceLaw::constant(std::move(radii))};
    s.substrate = Substrate::galton_watson;
    s.offspring = std::move(offspring);
    s.root_rule = rule;
    return s;
  }

 private:
  EnvSpec(SequenceLaw n, SequenceLaw r) : stations(std::move(n)), radii(std::move(r)) {}
};

// E t^{annealed radius}: the increments of E[P(R <= n)^N] form a pgf, so
// t <= 1 always converges and t > 1 is settled by the annealed descriptor.
inline SeriesValue gw_phi(const Law& stations, const Law& radius, double t,
                          double tol = 1e-12) {
  detail::require(t >= 0.0, "gw_phi: t must be non-negative");
  if (t == 1.0) return SeriesValue::exact(1.0);
  double t_min = detail::station_probe_floor(stations);
  if (t < 1.0) {
    // E t^X = 1 - (1-t) sum_{k>=0} A(k+1) t^k; the unseen terms sum below
    // A(K+1) t^K / (1-t), so the value carries remainder A(K+1) t^K
    NeumaierSum acc;
    double tk = 1.0, rem = kInf, a_prev = 1.0;
    for (int64_t k = 0;; ++k) {
      double tr = radius.tail(k + 1);
      if (tr > 0.0 && tr < t_min) {
        rem = a_prev * tk;  // the annealed tail is non-increasing
        break;
      }
      double a = stations.omp(tr);
      rem = a * tk;
      if (rem < tol || k > (1 << 22)) break;
      acc.add(a * tk);
      tk *= t;
      a_prev = a;
    }
    return {1.0 - (1.0 - t) * acc.value(), rem, false};
  }
  Law ann = annealed_radius(stations, radius);
  const Decay& da = ann.decay();
  switch (da.kind) {
    case Decay::Kind::bounded: {
      // E t^X = 1 + (1 - 1/t) sum_{k=1}^{max} A(k) t^k exactly
      NeumaierSum acc;
      for (int64_t k = 1; k <= da.support_max; ++k) {
        double tr = radius.tail(k);
        if (tr > 0.0 && tr < t_min) return {kNaN, kInf, false};
        acc.add(stations.omp(tr) * std::pow(t, static_cast<double>(k)));
      }
      double v = 1.0 + (1.0 - 1.0 / t) * acc.value();
      if (!std::isfinite(v)) return SeriesValue::make_infinite();
      return {v, 1e-13 * v, false};
    }
    case Decay::Kind::geometric: {
      double rt = da.rate * t;
      if (rt >= 1.0) {
        if (da.coeff_lo > 0.0) return SeriesValue::make_infinite();
        return {kNaN, kInf, false};
      }
      NeumaierSum acc;
      double tk = t, rem = kInf;
      for (int64_t k = 1;; ++k) {
        if (k > da.valid_from) {
          rem = da.coeff_hi * std::pow(rt, static_cast<double>(k)) / (1.0 - rt);
          if (rem < tol * (1.0 + acc.value()) || k > (1 << 22)) break;
        }
        double tr = radius.tail(k);
        if (tr > 0.0 && tr < t_min) {
          if (!std::isfinite(rem)) return {kNaN, kInf, false};
          break;
        }
        acc.add(stations.omp(tr) * tk);
        tk *= t;
      }
      double scale = 1.0 - 1.0 / t;
      return {1.0 + scale * acc.value(), scale * rem, false};
    }
    case Decay::Kind::power:
      if (da.coeff_lo > 0.0) return SeriesValue::make_infinite();
      return {kNaN, kInf, false};
    default: {
      // raw-descriptor fallbacks: a positive slope keeps geometric radius
      // divergence; the harmonic lift gives a certified sum below the rate
      const Decay& dr = radius.decay();
      double slope = detail::station_slope_floor(stations, radius);
      if (slope > 0.0 && dr.kind == Decay::Kind::geometric && dr.coeff_lo > 0.0 &&
          dr.rate * t >= 1.0)
        return SeriesValue::make_infinite();
      if (detail::log_station_floor(stations.decay(), dr) > 0.0 && t > 1.0)
        return SeriesValue::make_infinite();
      detail::StationLift lift = detail::harmonic_station_lift(stations);
      SeriesValue lifted = detail::lifted_power_series(stations, radius, lift, t);
      if (!std::isnan(lifted.value))
        return {1.0 + (1.0 - 1.0 / t) * lifted.value, (1.0 - 1.0 / t) * lifted.remainder,
                false};
      return {kNaN, kInf, false};
    }
  }
}

inline SeriesValue gw_phi(const EnvSpec& env, double t, double tol = 1e-12) {
  return gw_phi(env.stations.constant_law(), env.radii.constant_law(), t, tol);
}

namespace detail {

inline SeriesValue checked_offspring_mean(const Law& offspring, const char* who) {
  SeriesValue mu = offspring.mean();
  require(!std::isnan(mu.value), std::string(who) + ": offspring mean must be certified");
  require(offspring.pmf(1) < 1.0, std::string(who) + ": offspring must branch");
  return mu;
}

}  // namespace detail

// Direct spread on the branching substrate: survives once the reach pgf at
// the offspring mean clears 1 + its value at 0, dies when a degree bound k
// keeps it at or below 2 - 1/k.
inline SurvivalReport gw_fireworks_class(const Law& offspring, const Law& stations,
                                         const Law& radius) {
  SeriesValue mu = detail::checked_offspring_mean(offspring, "gw_fireworks_class");
  detail::require(mu.infinite || mu.value - mu.remainder > 1.0,
                  "gw_fireworks_class: offspring mean must exceed 1");
  SurvivalReport rep;
  double phi0 = stations.pgf_point(radius.cdf(0));
  if (phi0 >= 1.0) {
    rep.classification = Classification::dies_as;
    rep.criterion = "zero-reach";
    rep.probability = 0.0;
    return rep;
  }
  std::string conditioning =
      stations.pmf(0) == 0.0
          ? "holds for almost every infinite tree with a station at the root"
          : "holds conditionally on an infinite tree and at least one root station";

  SeriesValue phi_mu = mu.infinite
                           ? SeriesValue::make_infinite()
                           : gw_phi(stations, radius, std::max(1.0, mu.value - mu.remainder));
  if (phi_mu.infinite) {
    rep.classification = Classification::survives_pos_prob;
    rep.criterion = "reach-pgf-gap-supercritical";
    rep.note = "reach pgf diverges at the offspring mean; " + conditioning;
    return rep;
  }
  if (!std::isnan(phi_mu.value)) {
    double gap = (phi_mu.value - phi_mu.remainder) - 1.0 - phi0;
    if (gap > 1e-11 * (1.0 + phi0)) {
      rep.classification = Classification::survives_pos_prob;
      rep.criterion = "reach-pgf-gap-supercritical";
      rep.note = "gap " + detail::fmt_num(gap) + "; " + conditioning;
      return rep;
    }
  }
  const Decay& dd = offspring.decay();
  if (dd.kind == Decay::Kind::bounded && dd.support_max >= 2) {
    double k = static_cast<double>(dd.support_max);
    SeriesValue phi_k = gw_phi(stations, radius, k);
    if (!phi_k.infinite && !std::isnan(phi_k.value) &&
        phi_k.value + phi_k.remainder <= 2.0 - 1.0 / k + 1e-11) {
      rep.classification = Classification::dies_as;
      rep.criterion = "reach-pgf-bounded-subcritical";
      rep.probability = 0.0;
      return rep;
    }
  }
  rep.classification = Classification::inconclusive;
  rep.criterion = "reach-pgf-intermediate";
  return rep;
}

struct GWAnalysis {
  double mu_D = kNaN;
  std::vector<std::pair<double, double>> phi_at;  // (point, reach pgf value)
  double phi1 = kNaN;  // hearing series at the offspring mean; +inf when divergent
  double phi2 = kNaN;  // its damped companion (a partial sum when phi1 diverges)
  double M_c = kNaN;   // reciprocal limsup A(n)^{1/n}
  double pi = kNaN;    // extinction probability of the bare offspring process
  double pi_residual = 0.0;

  void check() const {
    detail::require(std::isnan(mu_D) || mu_D > 1.0, "gw analysis: offspring mean must exceed 1");
    detail::require(std::isnan(pi) ||
                        (pi >= 0.0 && pi <= 1.0 && std::abs(pi_residual) <= 1e-9),
                    "gw analysis: extinction probability must be a fixed point in [0,1]");
    detail::require(std::isnan(M_c) || M_c >= 1.0 - 1e-12,
                    "gw analysis: divergence threshold below 1");
    if (std::isfinite(phi1) && std::isfinite(phi2))
      detail::require(phi2 <= phi1 + 1e-9 * (1.0 + std::abs(phi1)),
                      "gw analysis: damped series exceeds its parent");
  }
};

struct GWReverseResult {
  SurvivalReport report;
  GWAnalysis analysis;
};

// Listening spread on the branching substrate. The hearing series
// phi1 = sum_n A(n) mu^n and its damped companion
// phi2 = sum_n A(n) mu^n prod_{j<n} (1 - A(j)) give the four-way split:
// divergent phi1 hears almost surely, phi2 > 1 hears with a probability
// strictly inside (0,1), phi2 <= 1 never does.
inline GWReverseResult gw_reverse_class(const Law& offspring, const Law& stations,
                                        const Law& radius, double tol = 1e-12) {
  SeriesValue mu_sv = detail::checked_offspring_mean(offspring, "gw_reverse_class");
  detail::require(!mu_sv.infinite && mu_sv.value - mu_sv.remainder > 1.0,
                  "gw_reverse_class: needs a finite offspring mean above 1");
  detail::require(mu_sv.remainder <= 1e-9 * (1.0 + mu_sv.value),
                  "gw_reverse_class: offspring mean too uncertain");
  double mu = mu_sv.value;

  GWReverseResult out;
  GWAnalysis& an = out.analysis;
  an.mu_D = mu;

  FixedPointResult pi = smallest_fixed_point(
      [&offspring](double s) { return offspring.pgf_point(std::clamp(s, 0.0, 1.0)); }, tol);
  detail::require(pi.converged, "gw_reverse_class: extinction iteration failed");
  an.pi = pi.value;
  an.pi_residual = pi.residual;

  Law ann = annealed_radius(stations, radius);
  const Decay& da = ann.decay();
  const Decay& dr = radius.decay();
  const Decay& dn = stations.decay();
  double slope = detail::station_slope_floor(stations, radius);
  detail::StationLift lift = detail::harmonic_station_lift(stations);

  // reciprocal growth rate of the annealed tail
  if (da.kind == Decay::Kind::bounded) {
    an.M_c = kInf;
  } else if (da.kind == Decay::Kind::geometric && da.coeff_lo > 0.0 &&
             std::isfinite(da.coeff_hi)) {
    an.M_c = 1.0 / da.rate;
  } else if (da.kind == Decay::Kind::power && da.coeff_lo > 0.0) {
    an.M_c = 1.0;
  } else if (detail::log_station_floor(dn, dr) > 0.0) {
    an.M_c = 1.0;  // a harmonic floor and tails at most 1 pin the root at 1
  } else if (slope > 0.0 && lift.usable && dr.kind == Decay::Kind::geometric &&
             dr.coeff_lo > 0.0 && std::isfinite(dr.coeff_hi)) {
    an.M_c = 1.0 / dr.rate;  // the lift costs only a polynomial factor
  }

  for (double t : {0.0, 1.0, mu}) {
    SeriesValue v = gw_phi(stations, radius, t, tol);
    an.phi_at.emplace_back(t, v.infinite ? kInf : v.value);
  }

  double t_min = detail::station_probe_floor(stations);

  // first series: symbolic divergence, otherwise a certified numeric sum
  bool phi1_div = false, phi1_fin = false;
  double rate_bound = kNaN, coeff_bound = kNaN;  // certified geometric majorant of A
  if (da.kind == Decay::Kind::bounded) {
    phi1_fin = true;
  } else if (da.kind == Decay::Kind::geometric) {
    if (da.rate * mu >= 1.0 && da.coeff_lo > 0.0) phi1_div = true;
    if (da.rate * mu < 1.0 && std::isfinite(da.coeff_hi)) {
      phi1_fin = true;
      rate_bound = da.rate;
      coeff_bound = da.coeff_hi;
    }
  } else if (da.kind == Decay::Kind::power && da.coeff_lo > 0.0) {
    phi1_div = true;  // mu > 1 beats every power tail
  } else {
    if (detail::log_station_floor(dn, dr) > 0.0) phi1_div = true;
    if (slope > 0.0 && dr.kind == Decay::Kind::geometric && dr.coeff_lo > 0.0 &&
        dr.rate * mu >= 1.0)
      phi1_div = true;
    if (!phi1_div && dr.kind == Decay::Kind::power && dr.coeff_lo > 0.0 && slope > 0.0)
      phi1_div = true;
  }

  SurvivalReport& rep = out.report;
  std::string conditioning =
      stations.pmf(0) == 0.0
          ? "for almost every infinite tree"
          : "conditionally on the realized infinite tree";

  if (phi1_div) {
    an.phi1 = kInf;
    // partial damped sum, reported but not classified against
    double log_prod = 0.0;
    NeumaierSum damped;
    for (int64_t n = 1; n <= 4096; ++n) {
      double tr = radius.tail(n);
      if (tr > 0.0 && tr < t_min) break;
      double a = stations.omp(tr);
      if (a <= 0.0) break;
      damped.add(std::exp(static_cast<double>(n) * std::log(mu) + std::log(a) + log_prod));
      if (a >= 1.0) break;
      log_prod += std::log1p(-a);
    }
    an.phi2 = damped.value();
    rep.classification = Classification::survives_as;
    rep.criterion = "hearing-series-divergent";
    rep.probability = 1.0;
    rep.note = "hearing series diverges at the offspring mean " + conditioning;
    return out;
  }

  SeriesValue lifted = detail::lifted_power_series(stations, radius, lift, mu);
  if (!phi1_fin && !std::isnan(lifted.value)) phi1_fin = true;

  if (!phi1_fin) {
    rep.classification = Classification::inconclusive;
    rep.criterion = "hearing-series-indeterminate";
    return out;
  }

  // phi1 and the damped series in one pass; past their validity start the
  // certified majorants bound the unseen terms, and damping only shrinks them
  bool have_geom = !std::isnan(coeff_bound);
  bool have_lift = !have_geom && lift.usable && dr.kind == Decay::Kind::geometric &&
                   std::isfinite(dr.coeff_hi) && dr.rate * mu < 1.0;
  double x = have_geom ? rate_bound * mu : dr.rate * mu;
  int64_t valid = da.valid_from;
  double alpha = 0.0, beta = 0.0;
  if (have_lift) {
    valid = std::max<int64_t>(dr.valid_from, 1);
    while (dr.coeff_hi * std::pow(dr.rate, static_cast<double>(valid)) *
               static_cast<double>(lift.v) >
           1.0)
      ++valid;
    alpha = dr.coeff_hi * (lift.head + lift.ch * (3.0 + std::log(1.0 / dr.coeff_hi)));
    beta = dr.coeff_hi * lift.ch * std::log(1.0 / dr.rate);
  }
  NeumaierSum sum1, sum2;
  double log_prod = 0.0, rem1 = kInf, rem2 = kInf;
  double lmu = std::log(mu);
  bool truncated = false;
  for (int64_t n = 1;; ++n) {
    double tr = radius.tail(n);
    if (tr <= 0.0) {
      rem1 = rem2 = 0.0;  // the annealed tail has run out: both sums exact
      break;
    }
    if (tr < t_min) {
      truncated = !std::isfinite(rem1);  // fall back on the last majorant
      break;
    }
    double a = stations.omp(tr);
    if (a <= 0.0) {
      rem1 = rem2 = 0.0;
      break;
    }
    double la = std::log(a) + static_cast<double>(n) * lmu;
    sum1.add(std::exp(la));
    sum2.add(std::exp(la + log_prod));
    log_prod = a < 1.0 ? log_prod + std::log1p(-a) : -kInf;
    if (n >= valid) {
      if (have_geom)
        rem1 = coeff_bound * std::pow(x, static_cast<double>(n) + 1.0) / (1.0 - x);
      else if (have_lift)
        rem1 = detail::geom_poly_tail(x, n, alpha, beta);
      if (std::isfinite(rem1)) {
        rem2 = rem1 * std::exp(log_prod);
        if (rem1 < tol * (1.0 + sum1.value())) break;
      }
    }
    if (n > 200000) {
      truncated = true;
      break;
    }
  }
  an.phi1 = sum1.value() + (std::isfinite(rem1) ? rem1 : 0.0);
  an.phi2 = sum2.value();

  double margin = 1e-11 * std::max(1.0, sum2.value());
  if (sum2.value() > 1.0 + margin) {
    rep.classification = Classification::survives_pos_prob;
    rep.criterion = "damped-hearing-series-above-1";
    rep.note = "hearing probability is strictly between 0 and 1 " + conditioning;
    return out;
  }
  if (!truncated && std::isfinite(rem2) && sum2.value() + rem2 <= 1.0 + margin) {
    rep.classification = Classification::dies_as;
    rep.criterion = "damped-hearing-series-bounded";
    rep.probability = 0.0;
    rep.remainder_bound = rem2;
    return out;
  }
  rep.classification = Classification::inconclusive;
  rep.criterion = "hearing-series-indeterminate";
  return out;
}

}  // namespace rumor

#endif  // RUMOR_ENV_HPP
