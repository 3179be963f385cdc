#ifndef RUMOR_TREE_HPP
#define RUMOR_TREE_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rumor/law.hpp"
#include "rumor/numeric.hpp"
#include "rumor/report.hpp"
#include "rumor/rootfind.hpp"
#include "rumor/seq.hpp"

// Tree substrates and their rumor analytics. The cone process lets every
// newly informed vertex push the rumor down its subtree to depth R and then
// go quiet; the disk process grows by graph distance instead and only admits
// threshold bounds. Both are driven by the same radius laws as the line
// processes.

namespace rumor {

namespace detail {

inline std::int64_t parse_i64(std::string_view text, const char* what) {
  std::int64_t v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw std::invalid_argument(std::string("tree literal: bad integer for ") + what + ": '" +
                                std::string(text) + "'");
  return v;
}

}  // namespace detail

// Level structure of the substrate tree. `children(depth)` is the number of
// children of every vertex at that depth; unrooted homogeneous trees have
// degree d+1 everywhere, so their root keeps all d+1 neighbours as children
// while the rooted variant keeps d at every vertex including the root.
class TreeSpec {
 public:
  enum class Kind { homogeneous, rooted_plus, periodic, spherically_symmetric, galton_watson };

  static TreeSpec homogeneous(int64_t d) {
    detail::require(d >= 2, "tree: homogeneous degree parameter must be at least 2");
    TreeSpec t;
    t.kind_ = Kind::homogeneous;
    t.d_ = d;
    return t;
  }

  static TreeSpec rooted_plus(int64_t d) {
    detail::require(d >= 2, "tree: rooted degree parameter must be at least 2");
    TreeSpec t;
    t.kind_ = Kind::rooted_plus;
    t.d_ = d;
    return t;
  }

  static TreeSpec periodic(std::vector<int64_t> degrees) {
    detail::require(!degrees.empty(), "tree: periodic pattern is empty");
    for (int64_t d : degrees)
      detail::require(d >= 2, "tree: periodic degrees must be at least 2");
    TreeSpec t;
    t.kind_ = Kind::periodic;
    t.levels_ = std::move(degrees);
    return t;
  }

  // `children_per_level[l]` is the offspring count at depth l. Entries of 1
  // are allowed (a path has growth zero); the data is a finite prefix, so
  // every quantity derived from it is depth-limited.
  static TreeSpec spherically_symmetric(std::vector<int64_t> children_per_level,
                                        std::string source = "") {
    detail::require(!children_per_level.empty(), "tree: level data is empty");
    for (int64_t d : children_per_level)
      detail::require(d >= 1, "tree: level offspring counts must be at least 1");
    TreeSpec t;
    t.kind_ = Kind::spherically_symmetric;
    t.levels_ = std::move(children_per_level);
    t.source_ = std::move(source);
    return t;
  }

  // Offspring-random tree. Only supercritical, non-degenerate offspring laws
  // describe an infinite substrate worth analyzing, so both conditions are
  // enforced here rather than at each use site.
  static TreeSpec galton_watson(Law offspring) {
    SeriesValue mu = offspring.mean();
    detail::require(!std::isnan(mu.value), "tree: offspring mean is not classifiable");
    detail::require(mu.infinite || mu.value - mu.remainder > 1.0,
                    "tree: offspring mean must exceed 1");
    detail::require(offspring.pmf(1) < 1.0, "tree: offspring law concentrated on 1");
    TreeSpec t;
    t.kind_ = Kind::galton_watson;
    t.offspring_ = std::move(offspring);
    return t;
  }

  Kind kind() const { return kind_; }

  int64_t degree() const {
    detail::require(kind_ == Kind::homogeneous || kind_ == Kind::rooted_plus,
                    "tree: no single degree parameter");
    return d_;
  }

  const std::vector<int64_t>& period() const {
    detail::require(kind_ == Kind::periodic, "tree: not periodic");
    return levels_;
  }

  const std::vector<int64_t>& levels() const {
    detail::require(kind_ == Kind::spherically_symmetric, "tree: no recorded level data");
    return levels_;
  }

  const Law& offspring() const {
    detail::require(kind_ == Kind::galton_watson, "tree: no offspring law");
    return offspring_;
  }

  int64_t children(int64_t depth) const {
    detail::require(depth >= 0, "tree: negative depth");
    switch (kind_) {
      case Kind::homogeneous:
        return depth == 0 ? d_ + 1 : d_;
      case Kind::rooted_plus:
        return d_;
      case Kind::periodic: {
        int64_t base = levels_[static_cast<std::size_t>(depth % static_cast<int64_t>(levels_.size()))];
        return depth == 0 ? base + 1 : base;
      }
      case Kind::spherically_symmetric:
        if (depth >= static_cast<int64_t>(levels_.size()))
          throw std::out_of_range("tree: level data exhausted at depth " + std::to_string(depth));
        return levels_[static_cast<std::size_t>(depth)];
      case Kind::galton_watson:
        break;
    }
    throw std::invalid_argument("tree: offspring counts are random; sample them instead");
  }

  // Largest vertex degree (children + parent link). For recorded level data
  // this covers only the stored prefix.
  int64_t max_degree() const {
    switch (kind_) {
      case Kind::homogeneous:
      case Kind::rooted_plus:
        return d_ + 1;
      case Kind::periodic:
        return *std::max_element(levels_.begin(), levels_.end()) + 1;
      case Kind::spherically_symmetric: {
        int64_t best = levels_[0];  // root has no parent
        for (std::size_t l = 1; l < levels_.size(); ++l) best = std::max(best, levels_[l] + 1);
        return best;
      }
      case Kind::galton_watson:
        break;
    }
    throw std::invalid_argument("tree: offspring counts are random; no fixed maximum degree");
  }

  std::string literal() const {
    switch (kind_) {
      case Kind::homogeneous:
        return "homog:" + std::to_string(d_);
      case Kind::rooted_plus:
        return "plus:" + std::to_string(d_);
      case Kind::periodic: {
        std::string out = "periodic:";
        for (std::size_t i = 0; i < levels_.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(levels_[i]);
        }
        return out;
      }
      case Kind::spherically_symmetric:
        return "sphsym:file=" + source_;
      case Kind::galton_watson:
        return "gw:offspring=" + offspring_.literal();
    }
    return "?";
  }

  static TreeSpec parse(std::string_view text) {
    if (text.rfind("homog:", 0) == 0) return homogeneous(detail::parse_i64(text.substr(6), "homog"));
    if (text.rfind("plus:", 0) == 0) return rooted_plus(detail::parse_i64(text.substr(5), "plus"));
    if (text.rfind("periodic:", 0) == 0) {
      std::string_view rest = text.substr(9);
      std::vector<int64_t> ds;
      while (!rest.empty()) {
        std::size_t c = rest.find(',');
        ds.push_back(detail::parse_i64(rest.substr(0, c), "periodic"));
        if (c == std::string_view::npos) break;
        rest = rest.substr(c + 1);
      }
      return periodic(std::move(ds));
    }
    if (text.rfind("sphsym:file=", 0) == 0) {
      std::string path(text.substr(12));
      std::ifstream in(path);
      if (!in) throw std::invalid_argument("tree literal: cannot open level file '" + path + "'");
      std::vector<int64_t> ds;
      int64_t v = 0;
      while (in >> v) ds.push_back(v);
      detail::require(in.eof(), "tree literal: non-integer entry in level file '" + path + "'");
      detail::require(!ds.empty(), "tree literal: level file '" + path + "' is empty");
      return spherically_symmetric(std::move(ds), path);
    }
    if (text.rfind("gw:offspring=", 0) == 0) return galton_watson(Law::parse(text.substr(13)));
    throw std::invalid_argument(
        "tree literal: expected homog:D, plus:D, periodic:D1,D2,..., sphsym:file=PATH or "
        "gw:offspring=LAW; got '" +
        std::string(text) + "'");
  }

 private:
  Kind kind_ = Kind::homogeneous;
  int64_t d_ = 2;
  std::vector<int64_t> levels_;
  Law offspring_;  // empty handle unless kind is galton_watson
  std::string source_;
};

// Asymptotic level-growth rate lim_n min_v (1/n) ln |descendants of v at
// depth n below v|. Closed form for homogeneous and periodic structures; for
// recorded level data the estimate is the best window minimum the prefix
// supports, reported with the window length that attains it, and it never
// extrapolates past the data.
struct GrowthEstimate {
  double value = 0.0;
  int64_t depth = 0;  // window length behind `value`
  bool exact = false;
};

inline GrowthEstimate growth_estimate(const TreeSpec& spec, int64_t n) {
  detail::require(n >= 1, "growth_dim: depth must be at least 1");
  switch (spec.kind()) {
    case TreeSpec::Kind::homogeneous:
    case TreeSpec::Kind::rooted_plus:
      return {std::log(static_cast<double>(spec.degree())), n, true};
    case TreeSpec::Kind::periodic: {
      NeumaierSum s;
      for (int64_t d : spec.period()) s.add(std::log(static_cast<double>(d)));
      return {s.value() / static_cast<double>(spec.period().size()), n, true};
    }
    case TreeSpec::Kind::spherically_symmetric: {
      const auto& lv = spec.levels();
      int64_t len = static_cast<int64_t>(lv.size());
      std::vector<double> pre(static_cast<std::size_t>(len) + 1, 0.0);
      for (int64_t i = 0; i < len; ++i)
        pre[static_cast<std::size_t>(i) + 1] =
            pre[static_cast<std::size_t>(i)] + std::log(static_cast<double>(lv[static_cast<std::size_t>(i)]));
      // Window sums are superadditive under concatenation, so each window
      // minimum is a refinable estimate and the best one over lengths up to
      // min(n, data) is monotone in n.
      GrowthEstimate best{-kInf, 0, false};
      for (int64_t m = 1; m <= std::min(n, len); ++m) {
        double worst = kInf;
        for (int64_t l = 0; l + m <= len; ++l)
          worst = std::min(worst, pre[static_cast<std::size_t>(l + m)] - pre[static_cast<std::size_t>(l)]);
        double mean = worst / static_cast<double>(m);
        if (mean > best.value) best = {mean, m, false};
      }
      return best;
    }
    case TreeSpec::Kind::galton_watson:
      break;
  }
  throw std::invalid_argument("growth_dim: offspring-random trees have no fixed level growth");
}

inline double growth_dim(const TreeSpec& spec, int64_t n) { return growth_estimate(spec, n).value; }

namespace detail {

// Sum_k P(R=k) x^{mult (d^k - sub)} for x in [0,1]. The exponents increase
// with k, so cutting after k leaves at most tail(k+1) x^{e_{k+1}} behind;
// that bound is returned alongside. The cut index grows with x, which keeps
// the truncated map monotone in x as the fixed-point iteration requires.
struct PowerSeriesCut {
  double value = 0.0;
  double remainder = 0.0;
};

inline PowerSeriesCut cone_power_sum(const Law& R, double x, int64_t d, double mult, double sub,
                                     double tol_rem) {
  detail::require(x >= 0.0, "cone series: negative base");
  if (x >= 1.0) return {1.0, 0.0};
  NeumaierSum acc;
  double dk = 1.0;
  for (int64_t k = 0;; ++k) {
    double p = R.pmf(k);
    if (p > 0.0) {
      double e = mult * (dk - sub);
      acc.add(p * (e == 0.0 ? 1.0 : std::pow(x, e)));
    }
    double tl = R.tail(k + 1);
    if (tl <= 0.0) return {std::min(1.0, acc.value()), 0.0};
    double dk1 = dk * static_cast<double>(d);
    double bound = tl * std::pow(x, mult * (dk1 - sub));
    // Any x < 1 is at most 1 - 2^-53, so the bound underflows long before
    // the exponent scale exceeds the double range.
    if (bound < tol_rem || dk1 > 1e300 || k > (int64_t{1} << 20))
      return {std::min(1.0, acc.value()), bound};
    dk = dk1;
  }
}

// Certified upper bound on sum_{k >= from} P(X >= k); +inf when the decay
// descriptor cannot produce one.
inline double tail_suffix_sum_bound(const Law& law, int64_t from) {
  const Decay& d = law.decay();
  switch (d.kind) {
    case Decay::Kind::bounded: {
      NeumaierSum s;
      for (int64_t k = from; k <= d.support_max; ++k) s.add(law.tail(k));
      return std::max(0.0, s.value());
    }
    case Decay::Kind::geometric: {
      if (!(d.rate < 1.0) || !std::isfinite(d.coeff_hi)) return kInf;
      int64_t f = std::max(from, d.valid_from);
      NeumaierSum head;
      for (int64_t k = from; k < f; ++k) head.add(law.tail(k));
      return head.value() + d.coeff_hi * std::pow(d.rate, static_cast<double>(f)) / (1.0 - d.rate);
    }
    case Decay::Kind::power: {
      // Only clean power envelopes; growing log corrections would need their
      // own integral bound and never occur in the laws routed through here.
      if (!(d.exponent > 1.0) || !std::isfinite(d.coeff_hi)) return kInf;
      if (d.log_exp < 0.0 || d.loglog_exp < 0.0) return kInf;
      int64_t f = std::max({from, d.valid_from, int64_t{3}});
      NeumaierSum head;
      for (int64_t k = from; k < f; ++k) head.add(law.tail(k));
      double a = d.exponent;
      return head.value() +
             d.coeff_hi * std::pow(static_cast<double>(f - 1), 1.0 - a) / (a - 1.0);
    }
    case Decay::Kind::unknown:
    default:
      return kInf;
  }
}

}  // namespace detail

// Three-way regime split for the cone process on the rooted tree with d
// children per vertex: immediate relays alone branch supercritically, or the
// reach-weighted offspring mean E(d^R) settles it, or neither printed
// criterion applies.
inline SurvivalReport cone_regime(int64_t d, const Law& R) {
  detail::require(d >= 2, "cone_regime: d must be at least 2");
  double p0 = R.cdf(0);
  double dd = static_cast<double>(d);
  double relay = (1.0 - p0) * dd;
  if (relay > 1.0) {
    auto rep = make_report(Classification::survives_pos_prob, "relay-branching-supercritical");
    rep.note = "immediate relays branch at rate " + detail::fmt_num(relay);
    return rep;
  }
  SeriesValue e = R.power_mean(dd);
  if (e.infinite)
    return make_report(Classification::survives_pos_prob, "reach-mean-supercritical",
                       "E(d^R) diverges");
  if (std::isnan(e.value))
    return make_report(Classification::inconclusive, "reach-mean-unavailable",
                       "no usable tail descriptor for E(d^R)");
  double eq = 1e-11 * std::max(1.0, std::abs(e.value));
  if (e.remainder > eq)
    return make_report(Classification::inconclusive, "reach-mean-uncertain",
                       "E(d^R) evaluation remainder " + detail::fmt_num(e.remainder) +
                           " too wide to compare");
  double up = 1.0 + p0;
  double down = 2.0 - 1.0 / dd;
  if (e.value - e.remainder > up + eq) {
    auto rep = make_report(Classification::survives_pos_prob, "reach-mean-supercritical");
    rep.note = "E(d^R) = " + detail::fmt_num(e.value) + " > 1 + P(R=0)";
    return rep;
  }
  if (e.value + e.remainder <= down + eq) {
    auto rep = make_report(Classification::dies_as, "reach-mean-subcritical");
    rep.note = "E(d^R) = " + detail::fmt_num(e.value) + " <= 2 - 1/d";
    return rep;
  }
  return make_report(Classification::inconclusive, "reach-mean-intermediate",
                     "E(d^R) = " + detail::fmt_num(e.value) + " lies between 2 - 1/d and 1 + P(R=0)");
}

// Smallest non-negative fixed points of the two relay generating maps
//   g(x) = E(x^{d^R}) + (1-x) P(R=0)          (single subtree)
//   h(x) = E(x^{(d/(d-1)) (d^R - 1)})         (spine-corrected subtree)
// Both maps are convex, non-decreasing and fix 1, so the smallest root is
// exactly 1 whenever the slope at 1 stays at most 1; catching that case
// analytically avoids the tangent iteration, which would crawl.
struct ConeFixedPoints {
  double rho = 1.0;
  double psi = 1.0;
  double rho_residual = 0.0;
  double psi_residual = 0.0;
};

inline ConeFixedPoints cone_fixed_points(int64_t d, const Law& R, double tol = 1e-12) {
  detail::require(d >= 2, "cone_fixed_points: d must be at least 2");
  detail::require(tol > 0.0, "cone_fixed_points: tol must be positive");
  double p0 = R.cdf(0);
  double dd = static_cast<double>(d);
  SeriesValue e = R.power_mean(dd);
  bool slope_known = e.finite() && !std::isnan(e.value);
  double slope_hi = slope_known ? e.value + e.remainder : kInf;
  double tol_rem = tol / 10.0;
  const double eq_slack = 1e-11;
  ConeFixedPoints out;

  auto solve = [&](double mult, double sub, double linear) {
    auto g = [&](double x) {
      double v = detail::cone_power_sum(R, x, d, mult, sub, tol_rem).value + (1.0 - x) * linear;
      return std::min(v, 1.0);
    };
    FixedPointResult r = smallest_fixed_point(g, tol);
    if (!r.converged) throw std::runtime_error("cone_fixed_points: iteration did not converge");
    return r;
  };

  if (slope_known && slope_hi - p0 <= 1.0 + eq_slack) {
    out.rho = 1.0;
  } else {
    FixedPointResult r = solve(1.0, 0.0, p0);
    out.rho = r.value;
    out.rho_residual = r.residual;
  }
  double mult = dd / (dd - 1.0);
  if (slope_known && mult * (slope_hi - 1.0) <= 1.0 + eq_slack) {
    out.psi = 1.0;
  } else {
    FixedPointResult r = solve(mult, 1.0, 0.0);
    out.psi = r.value;
    out.psi_residual = r.residual;
  }
  return out;
}

enum class TreeScope { plus, full };

// Survival probability bracket for the cone process. The rooted scope reads
// the bracket straight off the fixed points; the unrooted scope corrects for
// the extra root branch. Truncation remainders are folded in on the safe
// side, so `low` only ever shrinks and `high` only ever grows; accuracy near
// a tangency is limited by the fixed-point residual.
inline std::pair<double, double> cone_survival_bounds(int64_t d, const Law& R, TreeScope scope,
                                                      double tol = 1e-12) {
  ConeFixedPoints fp = cone_fixed_points(d, R, tol);
  if (scope == TreeScope::plus) return {1.0 - fp.rho, 1.0 - fp.psi};
  double p0 = R.cdf(0);
  double dd = static_cast<double>(d);
  double tol_rem = tol / 10.0;
  auto lo = detail::cone_power_sum(R, fp.rho, d, (dd + 1.0) / dd, 0.0, tol_rem);
  auto hi = detail::cone_power_sum(R, fp.psi, d, (dd + 1.0) / (dd - 1.0), 1.0, tol_rem);
  double low =
      1.0 - (1.0 - std::pow(fp.rho, (dd + 1.0) / dd)) * p0 - (lo.value + lo.remainder);
  double high = 1.0 - hi.value;  // dropped positive remainder keeps this an upper value
  low = std::clamp(low, 0.0, 1.0);
  high = std::clamp(high, 0.0, 1.0);
  if (low > high) {
    // the two series agree to remainder precision at worst
    if (low - high > 1e-9) throw std::logic_error("cone_survival_bounds: bracket inverted");
    low = high;
  }
  return {low, high};
}

// Mean informed-set size bracket, valid only while E(d^R) < 2 - 1/d.
inline std::pair<double, double> cone_size_bounds(int64_t d, const Law& R) {
  detail::require(d >= 2, "cone_size_bounds: d must be at least 2");
  double dd = static_cast<double>(d);
  SeriesValue e = R.power_mean(dd);
  double cap = 2.0 - 1.0 / dd;
  if (!e.finite() || std::isnan(e.value) || !(e.value + e.remainder < cap))
    throw std::domain_error("cone_size_bounds: needs E(d^R) < 2 - 1/d");
  double p0 = R.cdf(0);
  double ev = e.value;
  double low = (dd + ev - p0) / (dd * (1.0 - ev + p0));
  double high = (ev + dd - 2.0) / (2.0 * dd - 1.0 - dd * ev);
  return {low, high};
}

// Reverse relay on the d-ary tree: each vertex reaches distance R back
// toward the root, and the root hears almost surely exactly when the
// growth-weighted hearing series sum_n d^n P(R >= n) diverges. The damped
// variant sum_n d^n P(R >= n) prod_{j<n} (1 - P(R >= j)) at most 1 settles
// extinction; between the two certificates the probability is strictly
// inside (0,1) and the report says so.
inline SurvivalReport reverse_cone_class(int64_t d, const Law& R, double tol = 1e-12) {
  detail::require(d >= 2, "reverse_cone_class: d must be at least 2");
  detail::require(tol > 0.0, "reverse_cone_class: tol must be positive");
  const Decay& dec = R.decay();
  double dd = static_cast<double>(d);
  double rd = dec.rate * dd;

  enum { div_yes, div_no, div_unknown } first = div_unknown;
  switch (dec.kind) {
    case Decay::Kind::bounded:
      first = div_no;
      break;
    case Decay::Kind::geometric:
      if (rd >= 1.0 && dec.coeff_lo > 0.0)
        first = div_yes;
      else if (rd < 1.0 && std::isfinite(dec.coeff_hi))
        first = div_no;
      break;
    case Decay::Kind::power:
      if (dec.coeff_lo > 0.0) first = div_yes;  // d^n swamps any polynomial decay
      break;
    case Decay::Kind::unknown:
    default:
      break;
  }
  if (first == div_yes)
    return make_report(Classification::survives_as, "hearing-series-divergent",
                       "sum of d^n P(R >= n) diverges");

  NeumaierSum acc;
  double log_prod = 0.0;  // ln prod_{j=1}^{n-1} (1 - tail(j))
  double ld = std::log(dd);
  double rem = kInf;
  bool certified = false;
  const int64_t n_max = 200000;
  for (int64_t n = 1; n <= n_max; ++n) {
    double tl = R.tail(n);
    if (tl <= 0.0) {
      rem = 0.0;
      certified = true;
      break;
    }
    acc.add(std::exp(static_cast<double>(n) * ld + std::log(tl) + log_prod));
    if (acc.value() > 1.0 + 1e-12) break;
    if (tl >= 1.0) {
      // the damping product is exactly zero from here on
      rem = 0.0;
      certified = true;
      break;
    }
    log_prod += std::log1p(-tl);
    if (dec.kind == Decay::Kind::geometric && rd < 1.0 && std::isfinite(dec.coeff_hi) &&
        n >= dec.valid_from) {
      rem = std::exp(log_prod) * dec.coeff_hi * std::pow(rd, static_cast<double>(n + 1)) /
            (1.0 - rd);
      if (rem < tol) {
        certified = true;
        break;
      }
    }
  }

  double total = acc.value();
  if (certified && total + rem <= 1.0 + 1e-12) {
    auto rep = make_report(Classification::dies_as, "damped-hearing-series-bounded");
    rep.note = "damped series evaluates to " + detail::fmt_num(total);
    rep.remainder_bound = rem;
    return rep;
  }
  if (total > 1.0 + 1e-12) {
    std::string note = "damped series exceeds 1";
    if (first == div_no) note += "; hearing probability is strictly between 0 and 1";
    return make_report(Classification::inconclusive, "damped-hearing-series-above-1",
                       std::move(note));
  }
  return make_report(Classification::inconclusive, "hearing-series-indeterminate",
                     "no usable remainder bound for the damped series");
}

// Value of the depth-n window expression at window j for a varying radius
// sequence:
//   d^n prod_{k=0}^{n-1} [ 1 - prod_{i=0}^{k} P(R_{jn+i} < k+1-i) ].
inline double hetero_cone_expression(const SequenceLaw& seq, int64_t d, int64_t n, int64_t j) {
  detail::require(d >= 2, "hetero cone: d must be at least 2");
  detail::require(n >= 1, "hetero cone: window depth must be at least 1");
  detail::require(j >= 0, "hetero cone: negative window index");
  double out = 1.0;
  for (int64_t k = 0; k < n; ++k) {
    double inner = 1.0;
    for (int64_t i = 0; i <= k; ++i) inner *= seq.cdf_at(j * n + i, k - i);
    out *= 1.0 - inner;
  }
  return out * std::pow(static_cast<double>(d), static_cast<double>(n));
}

// Sufficient survival check for the cone process with position-dependent
// radii: the process survives with positive probability when the window
// expression stays above 1 along every late window. Certification needs the
// liminf, which is only available where the sequence structure pins it
// down; elsewhere the probe minimum is reported and the check stays open.
inline SurvivalReport hetero_cone_check(const SequenceLaw& seq, int64_t d, int64_t n,
                                        int64_t j_probe) {
  detail::require(j_probe >= 0, "hetero cone: probe count must be non-negative");
  double probe_min = kInf;
  int64_t arg = 0;
  for (int64_t j = 0; j <= j_probe; ++j) {
    double v = hetero_cone_expression(seq, d, n, j);
    if (v < probe_min) {
      probe_min = v;
      arg = j;
    }
  }
  std::string probe_note =
      "probe minimum " + detail::fmt_num(probe_min) + " at window " + std::to_string(arg);

  auto decide = [&](double liminf, const char* above, const char* at_most) {
    double margin = 1e-12 * std::max(1.0, liminf);
    if (liminf > 1.0 + margin) {
      auto rep = make_report(Classification::survives_pos_prob, above);
      rep.note = "liminf " + detail::fmt_num(liminf) + "; " + probe_note;
      return rep;
    }
    return make_report(Classification::inconclusive, at_most,
                       "liminf " + detail::fmt_num(liminf) + " does not clear 1; " + probe_note);
  };

  switch (seq.kind()) {
    case SequenceLaw::Kind::constant:
      return decide(hetero_cone_expression(seq, d, n, 0), "window-expression-constant-above-1",
                    "window-expression-constant-at-most-1");
    case SequenceLaw::Kind::alternating: {
      double v0 = hetero_cone_expression(seq, d, n, 0);
      double v = (n % 2 == 0) ? v0 : std::min(v0, hetero_cone_expression(seq, d, n, 1));
      return decide(v, "window-expression-periodic-above-1", "window-expression-periodic-at-most-1");
    }
    case SequenceLaw::Kind::bernoulli: {
      // Stall probabilities decrease to zero for every representable
      // sequence, so each window factor rises to 1 and the expression climbs
      // to d^n > 1.
      auto rep = make_report(Classification::survives_pos_prob, "window-expression-limit-above-1");
      rep.note = "expression increases to " +
                 detail::fmt_num(std::pow(static_cast<double>(d), static_cast<double>(n))) + "; " +
                 probe_note;
      return rep;
    }
    case SequenceLaw::Kind::spike:
    case SequenceLaw::Kind::profile:
      // late positions relay past the whole window, so every bracket decays
      // to zero and the liminf is 0: the criterion is silent
      return make_report(Classification::inconclusive, "window-expression-vanishing", probe_note);
  }
  return make_report(Classification::inconclusive, "window-expression-unclassified", probe_note);
}

// Sufficient survival criterion on level-regular trees: the per-level relay
// products rho_n = prod_{k<n} (1 - prod_{i<=k} P(R <= i)) have n-th root
// converging to L = 1 - prod_{i>=0} P(R <= i), and the cone process survives
// with positive probability once L exceeds exp(-growth). Bounded radii make
// the product finite and the comparison exact.
inline SurvivalReport spherical_survival_check(const TreeSpec& spec, const Law& R,
                                               int64_t depth = 64) {
  detail::require(depth >= 1, "spherical_survival_check: depth must be at least 1");
  detail::require(spec.kind() != TreeSpec::Kind::galton_watson,
                  "spherical_survival_check: needs a deterministic level structure");
  if (R.tail(1) <= 0.0)
    return make_report(Classification::dies_as, "zero-reach", "no vertex relays past itself");

  int64_t dim_depth = depth;
  if (spec.kind() == TreeSpec::Kind::spherically_symmetric)
    dim_depth = std::min<int64_t>(depth, static_cast<int64_t>(spec.levels().size()));
  GrowthEstimate g = growth_estimate(spec, dim_depth);
  double threshold = std::exp(-g.value);
  double margin = 1e-12 * std::max(1.0, threshold);
  std::string growth_note =
      "growth " + detail::fmt_num(g.value) + " at depth " + std::to_string(g.depth);

  if (R.cdf(0) <= 0.0) {
    // every vertex relays at least one level, so rho_n = 1 for all n
    if (g.value > 0.0)
      return make_report(Classification::survives_pos_prob, "immediate-relay-positive-growth",
                         growth_note);
    return make_report(Classification::inconclusive, "immediate-relay-flat-growth", growth_note);
  }

  // q_K = prod_{i<=K} P(R <= i) decreases to the full product, so 1 - q_K is
  // always a certified lower bound for L.
  const int64_t K = std::max<int64_t>(depth, 4096);
  double log_q = 0.0;
  bool q_zero = false;
  double trend = kNaN;  // diagnostic: rho_depth^{1/depth}
  {
    NeumaierSum trend_log;
    double qk = 1.0;
    for (int64_t i = 0; i <= K && !q_zero; ++i) {
      double c = R.cdf(i);
      if (c <= 0.0) {
        q_zero = true;
        break;
      }
      log_q += std::log(c);
      if (i < depth) {
        qk *= c;
        trend_log.add(std::log1p(-qk));
      }
      if (log_q < -745.0) q_zero = true;  // product underflow: L is 1 up to 1e-300
    }
    if (!q_zero || log_q < -745.0) trend = std::exp(trend_log.value() / static_cast<double>(depth));
  }
  double q_low = q_zero ? 0.0 : std::exp(log_q);
  double l_low = 1.0 - q_low;

  double l_high = 1.0;
  bool bounded = R.decay().kind == Decay::Kind::bounded;
  if (!q_zero) {
    double suffix = detail::tail_suffix_sum_bound(R, K + 2);
    if (std::isfinite(suffix)) {
      double floor = 1.0 - R.tail(K + 2);  // smallest factor past the cut
      l_high = 1.0 - q_low * std::exp(-suffix / floor);
    }
  }

  std::string note = "relay-product limit in [" + detail::fmt_num(l_low) + ", " +
                     detail::fmt_num(l_high) + "], threshold " + detail::fmt_num(threshold) +
                     ", finite trend " + detail::fmt_num(trend) + "; " + growth_note;
  if (l_low > threshold + margin)
    return make_report(Classification::survives_pos_prob,
                       bounded ? "bounded-reach-product" : "relay-product-above-threshold",
                       std::move(note));
  if (l_high <= threshold + margin)
    return make_report(Classification::inconclusive,
                       bounded ? "bounded-reach-product-below-threshold"
                               : "relay-product-below-threshold",
                       std::move(note));
  return make_report(Classification::inconclusive, "relay-product-margin-insufficient",
                     std::move(note));
}

// Everything the cone analytics produce for one (d, R) pair. Size bounds stay
// infinite outside their validity regime rather than erroring out.
struct ConeAnalysis {
  int64_t d = 2;
  double p0 = 0.0;
  SeriesValue e_dR;
  double rho = 1.0;
  double psi = 1.0;
  double rho_residual = 0.0;
  double psi_residual = 0.0;
  double surv_low = 0.0;
  double surv_high = 1.0;
  double size_low = kInf;
  double size_high = kInf;

  void check() const {
    if (!(rho >= 0.0 && rho <= 1.0 && psi >= 0.0 && psi <= 1.0))
      throw std::logic_error("cone analysis: fixed point outside [0,1]");
    if (!(surv_low >= 0.0 && surv_high <= 1.0 && surv_low <= surv_high + 1e-12))
      throw std::logic_error("cone analysis: survival bracket invalid");
    bool in_regime = e_dR.finite() && !std::isnan(e_dR.value) &&
                     e_dR.value + e_dR.remainder < 2.0 - 1.0 / static_cast<double>(d);
    if (in_regime != std::isfinite(size_low) || in_regime != std::isfinite(size_high))
      throw std::logic_error("cone analysis: size bracket does not match regime");
    if (in_regime && !(size_low >= 1.0 - 1e-12 && size_low <= size_high + 1e-12))
      throw std::logic_error("cone analysis: size bracket invalid");
  }
};

inline ConeAnalysis analyze_cone(int64_t d, const Law& R, TreeScope scope = TreeScope::plus,
                                 double tol = 1e-12) {
  ConeAnalysis a;
  a.d = d;
  a.p0 = R.cdf(0);
  a.e_dR = R.power_mean(static_cast<double>(d));
  ConeFixedPoints fp = cone_fixed_points(d, R, tol);
  a.rho = fp.rho;
  a.psi = fp.psi;
  a.rho_residual = fp.rho_residual;
  a.psi_residual = fp.psi_residual;
  auto sv = cone_survival_bounds(d, R, scope, tol);
  a.surv_low = sv.first;
  a.surv_high = sv.second;
  if (a.e_dR.finite() && !std::isnan(a.e_dR.value) &&
      a.e_dR.value + a.e_dR.remainder < 2.0 - 1.0 / static_cast<double>(d)) {
    auto sz = cone_size_bounds(d, R);
    a.size_low = sz.first;
    a.size_high = sz.second;
  }
  return a;
}

// Threshold bounds for disk growth (geometric radii with success rate p,
// infection by graph distance). Only brackets are available; each constructor
// records which comparison produced it.
enum class DiskBoundSource { degree_lower, tree_bracket, spherical_upper, site_upper };

inline const char* to_string(DiskBoundSource s) {
  switch (s) {
    case DiskBoundSource::degree_lower: return "degree-lower";
    case DiskBoundSource::tree_bracket: return "tree-bracket";
    case DiskBoundSource::spherical_upper: return "spherical-upper";
    case DiskBoundSource::site_upper: return "site-upper";
  }
  return "?";
}

struct DiskBounds {
  double lower = 0.0;
  double upper = 1.0;
  DiskBoundSource source = DiskBoundSource::degree_lower;

  void check() const {
    if (!(lower >= 0.0 && upper <= 1.0 && lower <= upper))
      throw std::logic_error("disk bounds: invalid bracket");
  }
};

// Lower bound for any graph whose degrees stay at most `max_degree`: disk
// growth is dominated by a branching count with mean (Delta-1) p (2 + p), so
// the threshold cannot sit below the positive root of that expression at 1.
inline DiskBounds disk_bounds_from_max_degree(int64_t max_degree) {
  detail::require(max_degree >= 2, "disk bounds: max degree must be at least 2");
  DiskBounds b;
  b.lower = -1.0 + std::sqrt(1.0 + 1.0 / static_cast<double>(max_degree - 1));
  b.upper = 1.0;
  b.source = DiskBoundSource::degree_lower;
  return b;
}

// Radical lower endpoint -1 + sqrt(1 - 1/d) of the homogeneous-tree bracket.
// Non-positive for every d >= 2, hence vacuous; kept callable so both bracket
// endpoints stay inspectable next to the positive degree-based bound (max
// degree d+1).
inline double disk_tree_lower_radical(int64_t d) {
  detail::require(d >= 2, "disk bounds: d must be at least 2");
  return -1.0 + std::sqrt(1.0 - 1.0 / static_cast<double>(d));
}

// Two-sided bracket for the homogeneous tree with d+1 neighbours per vertex.
// The vacuous radical endpoint is clamped at zero so `lower` stays a
// probability; see disk_tree_lower_radical and disk_bounds_from_max_degree
// for the raw forms.
inline DiskBounds disk_bounds_homogeneous(int64_t d) {
  detail::require(d >= 2, "disk bounds: d must be at least 2");
  DiskBounds b;
  b.lower = std::max(0.0, disk_tree_lower_radical(d));
  b.upper = 1.0 - std::sqrt(1.0 - 1.0 / static_cast<double>(d));
  b.source = DiskBoundSource::tree_bracket;
  return b;
}

// Upper bound for a level-regular tree from its growth rate: the homogeneous
// bracket applies with 1/d replaced by exp(-growth).
inline DiskBounds disk_bounds_spherical(double growth) {
  detail::require(std::isfinite(growth) && growth >= 0.0,
                  "disk bounds: growth must be finite and non-negative");
  DiskBounds b;
  b.lower = 0.0;
  b.upper = 1.0 - std::sqrt(1.0 - std::exp(-growth));
  b.source = DiskBoundSource::spherical_upper;
  return b;
}

// Comparison with independent site percolation: a radius of zero already
// occupies each site independently, so any site threshold caps the disk
// threshold from above.
inline DiskBounds disk_bounds_from_site_threshold(double site_pc) {
  detail::require(site_pc >= 0.0 && site_pc <= 1.0,
                  "disk bounds: site threshold must lie in [0,1]");
  DiskBounds b;
  b.lower = 0.0;
  b.upper = site_pc;
  b.source = DiskBoundSource::site_upper;
  return b;
}

}  // namespace rumor

#endif  // RUMOR_TREE_HPP
