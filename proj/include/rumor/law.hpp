#ifndef RUMOR_LAW_HPP
#define RUMOR_LAW_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rumor/numeric.hpp"
#include "rumor/rng.hpp"

namespace rumor {

using std::int64_t;
using std::uint64_t;

// How fast P(X >= k) decays. Every law carries one of these so that series
// over the law can be classified symbolically (finite vs divergent) and so
// that numeric truncations get rigorous remainder bounds. The envelope
//   coeff_lo * base(k) <= tail(k) <= coeff_hi * base(k)   for k >= valid_from
// uses base(k) = rate^k (geometric) or
// base(k) = k^-exponent (ln k)^-log_exp (lnln k)^-loglog_exp (power).
struct Decay {
  enum class Kind { bounded, geometric, power, unknown };

  Kind kind = Kind::unknown;
  int64_t support_max = 0;  // bounded: tail(k) == 0 for k > support_max

  double rate = 0.0;      // geometric base
  double exponent = 0.0;  // power base
  double log_exp = 0.0;
  double loglog_exp = 0.0;

  double coeff = kNaN;  // exact limit of tail(k)/base(k), NaN if unknown
  double coeff_lo = 0.0;
  double coeff_hi = kInf;
  int64_t valid_from = 1;

  // Tight bracket for exponent == 1 without log factors:
  //   coeff/(k+shift_hi) <= tail(k) <= coeff/(k+shift_lo) for k >= valid_from.
  bool has_shift_envelope = false;
  double shift_lo = 0.0;
  double shift_hi = 0.0;

  bool is_bounded() const { return kind == Kind::bounded; }

  double base(int64_t k) const {
    if (kind == Kind::geometric) return std::pow(rate, static_cast<double>(k));
    if (kind == Kind::power) {
      double x = static_cast<double>(k);
      double b = std::pow(x, -exponent);
      if (log_exp != 0.0) b *= std::pow(std::log(x), -log_exp);
      if (loglog_exp != 0.0) b *= std::pow(std::log(std::log(x)), -loglog_exp);
      return b;
    }
    return 0.0;
  }
};

namespace detail {

// Shortest decimal string that round-trips to the same double.
inline std::string fmt_num(double x) {
  if (x == static_cast<double>(static_cast<int64_t>(x)) && std::abs(x) < 1e15)
    return std::to_string(static_cast<int64_t>(x));
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// liminf / limsup of n * tail(n) read off a decay descriptor. The liminf is
// a safe 0 and the limsup a safe +inf whenever the shape is not pinned.
inline double n_tail_liminf(const Decay& d) {
  if (d.kind != Decay::Kind::power) return 0.0;
  if (d.exponent < 1.0 && d.coeff_lo > 0.0) return kInf;
  if (d.exponent == 1.0 && d.log_exp == 0.0 && d.loglog_exp == 0.0)
    return d.has_shift_envelope ? d.coeff : d.coeff_lo;
  return 0.0;
}

inline double n_tail_limsup(const Decay& d) {
  switch (d.kind) {
    case Decay::Kind::bounded:
      return 0.0;
    case Decay::Kind::geometric:
      return std::isfinite(d.coeff_hi) && d.rate < 1.0 ? 0.0 : kInf;
    case Decay::Kind::power:
      if (!std::isfinite(d.coeff_hi)) return kInf;
      if (d.exponent > 1.0) return 0.0;
      if (d.exponent == 1.0) {
        if (d.log_exp > 0.0) return 0.0;
        if (d.log_exp == 0.0 && d.loglog_exp > 0.0) return 0.0;
        if (d.log_exp == 0.0 && d.loglog_exp == 0.0)
          return d.has_shift_envelope ? d.coeff : d.coeff_hi;
      }
      return kInf;
    default:
      return kInf;
  }
}

}  // namespace detail

// Abstract law on the non-negative integers. tail(k) = P(X >= k), so
// tail(0) = 1 and cdf(k-1) + tail(k) = 1.
class LawImpl {
 public:
  virtual ~LawImpl() = default;

  virtual double cdf(int64_t k) const = 0;
  virtual double tail(int64_t k) const = 0;
  virtual double pmf(int64_t k) const {
    if (k < 0) return 0.0;
    return std::max(0.0, tail(k) - tail(k + 1));
  }

  // pgf on [0,1]; always converges there.
  virtual double pgf_point(double s) const;
  // 1 - pgf(1-t): the mass a station profile reacts with; accurate for t -> 0.
  virtual double omp(double t) const;
  // d/ds pgf(s) for s in [0,1).
  virtual double pgf_derivative(double s) const;

  // E t^X on t >= 0 with divergence detection via the decay descriptor.
  virtual SeriesValue pgf_extended(double t) const;
  virtual SeriesValue mean() const;         // may be infinite
  virtual SeriesValue factorial2() const;   // E X(X-1)

  // min{k : cdf(k) > u} for u in [0,1).
  virtual int64_t quantile(double u) const;

  virtual const Decay& decay() const = 0;
  virtual std::string literal() const = 0;

 protected:
  int64_t quantile_by_search(double u) const;
};

class Law {
 public:
  Law() = default;
  explicit Law(std::shared_ptr<const LawImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  const LawImpl& impl() const {
    detail::require(valid(), "law: empty");
    return *impl_;
  }

  double pmf(int64_t k) const { return impl().pmf(k); }
  double cdf(int64_t k) const { return impl().cdf(k); }
  double tail(int64_t k) const { return impl().tail(k); }
  double p0() const { return impl().pmf(0); }
  double pgf_point(double s) const { return impl().pgf_point(s); }
  double omp(double t) const { return impl().omp(t); }
  double pgf_derivative(double s) const { return impl().pgf_derivative(s); }
  SeriesValue pgf(double t) const { return impl().pgf_extended(t); }
  SeriesValue power_mean(double d) const { return impl().pgf_extended(d); }
  SeriesValue mean() const { return impl().mean(); }
  SeriesValue factorial2() const { return impl().factorial2(); }
  int64_t quantile(double u) const { return impl().quantile(u); }
  const Decay& decay() const { return impl().decay(); }
  std::string literal() const { return impl().literal(); }

  int64_t sample(SplitMix64& stream) const { return impl().quantile(stream.uniform01()); }
  int64_t sample_keyed(const TrialRng& rng, uint64_t key, std::uint32_t salt = 0) const {
    return impl().quantile(rng.uniform01(key, salt));
  }

  // Factories.
  static Law point_mass(int64_t c);
  static Law bernoulli(double p);
  static Law geometric(double p);  // P(X=k) = (1-p) p^k
  static Law binomial(int64_t n, double p);
  static Law power_law_example();
  static Law tail_power(double c, double a, double shift = 0.0, double cap = 1.0,
                        double log_exp = 0.0, double loglog_exp = 0.0);
  static Law tail_geometric(double coeff, double r, double cap = 1.0);
  static Law tabulated_zero(std::vector<double> probs);
  static Law tabulated_power(std::vector<double> probs, double c, double a, double shift = 0.0);
  static Law tabulated_geometric(std::vector<double> probs, double coeff, double r);
  static Law from_tail_function(std::function<double(int64_t)> tail, Decay decay,
                                std::string literal);

  static Law parse(std::string_view text);

 private:
  std::shared_ptr<const LawImpl> impl_;
};

// -------------------------------------------------------------------------
// Default evaluation machinery shared by families without closed forms.

namespace detail {

// Sum_{k>=1} tail(k) with a remainder bound from the decay descriptor.
inline SeriesValue tail_sum(const LawImpl& law) {
  const Decay& d = law.decay();
  switch (d.kind) {
    case Decay::Kind::bounded: {
      NeumaierSum s;
      for (int64_t k = 1; k <= d.support_max; ++k) s.add(law.tail(k));
      return SeriesValue::exact(s.value());
    }
    case Decay::Kind::geometric: {
      detail::require(d.rate > 0.0 && d.rate < 1.0, "tail_sum: bad geometric rate");
      NeumaierSum s;
      int64_t k = 1;
      double rem = kInf;
      for (;; ++k) {
        if (k > d.valid_from) {
          rem = d.coeff_hi * std::pow(d.rate, static_cast<double>(k)) / (1.0 - d.rate);
          if (rem < 1e-14 * (1.0 + std::abs(s.value())) || k > (1 << 22)) break;
        }
        s.add(law.tail(k));
      }
      return {s.value(), rem, false};
    }
    case Decay::Kind::power: {
      double a = d.exponent, b1 = d.log_exp, b2 = d.loglog_exp;
      bool diverges = (a < 1.0) || (a == 1.0 && (b1 < 1.0 || (b1 == 1.0 && b2 <= 1.0)));
      if (diverges) {
        if (d.coeff_lo > 0.0) return SeriesValue::make_infinite();
        return {kNaN, kInf, false};  // cannot certify either way
      }
      NeumaierSum s;
      int64_t k = 1;
      double rem = kInf;
      auto rem_bound = [&](int64_t from) {
        // bounds sum_{j >= from} tail(j) via an integral from from-1
        double x = static_cast<double>(from) - 1.0;
        if (a > 1.0) {
          double sh = d.has_shift_envelope ? std::min(d.shift_lo, 0.0) : 0.0;
          if (x + sh <= 0.5) return kInf;
          return d.coeff_hi * std::pow(x + sh, 1.0 - a) / (a - 1.0);
        }
        if (x <= 3.0) return kInf;
        if (b1 > 1.0) return d.coeff_hi * std::pow(std::log(x), 1.0 - b1) / (b1 - 1.0);
        return d.coeff_hi * std::pow(std::log(std::log(x)), 1.0 - b2) / (b2 - 1.0);
      };
      for (;; ++k) {
        if (k > std::max<int64_t>(d.valid_from, 2)) {
          rem = rem_bound(k);
          if (rem < 1e-12 * (1.0 + std::abs(s.value())) || k > (1 << 24)) break;
        }
        s.add(law.tail(k));
      }
      return {s.value(), rem, false};
    }
    case Decay::Kind::unknown:
    default:
      return {kNaN, kInf, false};
  }
}

// Sum_{k>=1} k * tail(k+1); E X(X-1) = 2 * this.
inline SeriesValue weighted_tail_sum(const LawImpl& law) {
  const Decay& d = law.decay();
  switch (d.kind) {
    case Decay::Kind::bounded: {
      NeumaierSum s;
      for (int64_t k = 1; k <= d.support_max; ++k)
        s.add(static_cast<double>(k) * law.tail(k + 1));
      return SeriesValue::exact(2.0 * s.value());
    }
    case Decay::Kind::geometric: {
      NeumaierSum s;
      int64_t k = 1;
      double rem = kInf;
      for (;; ++k) {
        if (k > d.valid_from) {
          // sum_{j>=k} j r^j <= r^k (k + r/(1-r)) / (1-r)
          double rk = std::pow(d.rate, static_cast<double>(k + 1));
          rem = 2.0 * d.coeff_hi * rk *
                (static_cast<double>(k) + d.rate / (1.0 - d.rate)) / (1.0 - d.rate);
          if (rem < 1e-12 * (1.0 + std::abs(s.value())) || k > (1 << 22)) break;
        }
        s.add(static_cast<double>(k) * law.tail(k + 1));
      }
      return {2.0 * s.value(), rem, false};
    }
    case Decay::Kind::power: {
      if (d.exponent <= 2.0) {
        if (d.coeff_lo > 0.0) return SeriesValue::make_infinite();
        return {kNaN, kInf, false};
      }
      double a = d.exponent;
      NeumaierSum s;
      int64_t k = 1;
      double rem = kInf;
      for (;; ++k) {
        if (k > std::max<int64_t>(d.valid_from, 2)) {
          // sum_{j >= k} j tail(j+1) <= c_hi integral from k-1 of x^{1-a}
          rem = 2.0 * d.coeff_hi * std::pow(static_cast<double>(k) - 1.0, 2.0 - a) / (a - 2.0);
          if (rem < 1e-12 * (1.0 + std::abs(s.value())) || k > (1 << 24)) break;
        }
        s.add(static_cast<double>(k) * law.tail(k + 1));
      }
      return {2.0 * s.value(), rem, false};
    }
    case Decay::Kind::unknown:
    default:
      return {kNaN, kInf, false};
  }
}

}  // namespace detail

inline double LawImpl::pgf_point(double s) const {
  detail::require(s >= 0.0 && s <= 1.0, "pgf_point: s outside [0,1]");
  if (s == 1.0) return 1.0;
  NeumaierSum acc;
  double sk = 1.0;
  for (int64_t k = 0;; ++k) {
    acc.add(pmf(k) * sk);
    sk *= s;
    // remainder <= s^{k+1} * tail(k+1) <= s^{k+1}
    if (sk < 1e-17 || sk * tail(k + 1) < 1e-17) break;
    if (k > (1 << 26)) break;
  }
  return std::min(1.0, acc.value());
}

inline double LawImpl::omp(double t) const {
  detail::require(t >= 0.0 && t <= 1.0, "omp: t outside [0,1]");
  if (t <= 0.0) return 0.0;
  if (t == 1.0) return 1.0 - pmf(0);
  // 1 - pgf(1-t) = t * sum_{j>=0} tail(j+1) (1-t)^j
  double s = 1.0 - t;
  NeumaierSum acc;
  double sj = 1.0;
  for (int64_t j = 0;; ++j) {
    double tl = tail(j + 1);
    acc.add(tl * sj);
    sj *= s;
    if (sj * tl < 1e-18 || sj < 1e-18) break;
    if (j > (1 << 27)) break;
  }
  return std::min(1.0, t * acc.value());
}

inline double LawImpl::pgf_derivative(double s) const {
  detail::require(s >= 0.0 && s < 1.0, "pgf_derivative: s outside [0,1)");
  NeumaierSum acc;
  double sk = 1.0;  // s^{k-1} for k = 1
  for (int64_t k = 1;; ++k) {
    acc.add(static_cast<double>(k) * pmf(k) * sk);
    sk *= s;
    if (sk * static_cast<double>(k + 1) * tail(k + 1) < 1e-17) break;
    if (k > (1 << 26)) break;
  }
  return acc.value();
}

inline SeriesValue LawImpl::pgf_extended(double t) const {
  detail::require(t >= 0.0, "pgf_extended: t must be non-negative");
  if (t <= 1.0) {
    if (t == 1.0) return SeriesValue::exact(1.0);
    double v = pgf_point(t);
    return {v, 1e-15, false};
  }
  const Decay& d = decay();
  switch (d.kind) {
    case Decay::Kind::bounded: {
      NeumaierSum acc;
      for (int64_t k = 0; k <= d.support_max; ++k) acc.add(pmf(k) * std::pow(t, static_cast<double>(k)));
      double v = acc.value();
      if (!std::isfinite(v)) return SeriesValue::make_infinite();
      return {v, 1e-13 * v, false};
    }
    case Decay::Kind::geometric: {
      double rt = d.rate * t;
      if (rt >= 1.0) {
        if (d.coeff_lo > 0.0) return SeriesValue::make_infinite();
        return {kNaN, kInf, false};
      }
      // E t^X = 1 + (1 - 1/t) sum_{k>=1} tail(k) t^k
      NeumaierSum acc;
      int64_t k = 1;
      double tk = t, rem = kInf;
      for (;; ++k) {
        if (k > d.valid_from) {
          rem = d.coeff_hi * std::pow(rt, static_cast<double>(k)) / (1.0 - rt);
          if (rem < 1e-13 * (1.0 + acc.value()) || k > (1 << 22)) break;
        }
        acc.add(tail(k) * tk);
        tk *= t;
      }
      double scale = 1.0 - 1.0 / t;
      return {1.0 + scale * acc.value(), scale * rem, false};
    }
    case Decay::Kind::power:
      if (d.coeff_lo > 0.0) return SeriesValue::make_infinite();
      return {kNaN, kInf, false};
    case Decay::Kind::unknown:
    default:
      return {kNaN, kInf, false};
  }
}

inline SeriesValue LawImpl::mean() const { return detail::tail_sum(*this); }

inline SeriesValue LawImpl::factorial2() const { return detail::weighted_tail_sum(*this); }

inline int64_t LawImpl::quantile_by_search(double u) const {
  detail::require(u >= 0.0 && u < 1.0, "quantile: u outside [0,1)");
  if (cdf(0) > u) return 0;
  int64_t lo = 0, hi = 1;  // invariant: cdf(lo) <= u
  while (cdf(hi) <= u) {
    lo = hi;
    hi *= 2;
    detail::require(hi < (int64_t{1} << 62), "quantile: search overflow");
  }
  while (hi - lo > 1) {
    int64_t mid = lo + (hi - lo) / 2;
    if (cdf(mid) > u)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline int64_t LawImpl::quantile(double u) const { return quantile_by_search(u); }

// -------------------------------------------------------------------------
// Families.

namespace detail {

class PointMassImpl final : public LawImpl {
 public:
  explicit PointMassImpl(int64_t c) : c_(c) {
    require(c >= 0, "point mass: support must be non-negative");
    d_.kind = Decay::Kind::bounded;
    d_.support_max = c_;
  }
  double cdf(int64_t k) const override { return k >= c_ ? 1.0 : 0.0; }
  double tail(int64_t k) const override { return k <= c_ ? 1.0 : 0.0; }
  double pmf(int64_t k) const override { return k == c_ ? 1.0 : 0.0; }
  double pgf_point(double s) const override { return std::pow(s, static_cast<double>(c_)); }
  double omp(double t) const override {
    if (c_ == 0) return 0.0;
    if (t >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(c_) * std::log1p(-t));
  }
  double pgf_derivative(double s) const override {
    if (c_ == 0) return 0.0;
    return static_cast<double>(c_) * std::pow(s, static_cast<double>(c_ - 1));
  }
  SeriesValue pgf_extended(double t) const override {
    double v = std::pow(t, static_cast<double>(c_));
    if (!std::isfinite(v)) return SeriesValue::make_infinite();
    return SeriesValue::exact(v);
  }
  SeriesValue mean() const override { return SeriesValue::exact(static_cast<double>(c_)); }
  SeriesValue factorial2() const override {
    return SeriesValue::exact(static_cast<double>(c_) * static_cast<double>(c_ - 1));
  }
  int64_t quantile(double) const override { return c_; }
  const Decay& decay() const override { return d_; }
  std::string literal() const override { return "point:" + std::to_string(c_); }

 private:
  int64_t c_;
  Decay d_;
};

class BernoulliImpl final : public LawImpl {
 public:
  explicit BernoulliImpl(double p) : p_(p) {
    require(p >= 0.0 && p <= 1.0, "bernoulli: p outside [0,1]");
    d_.kind = Decay::Kind::bounded;
    d_.support_max = p_ > 0.0 ? 1 : 0;
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return k >= 1 ? 1.0 : 1.0 - p_;
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    return k == 1 ? p_ : 0.0;
  }
  double pmf(int64_t k) const override {
    if (k == 0) return 1.0 - p_;
    return k == 1 ? p_ : 0.0;
  }
  double pgf_point(double s) const override { return 1.0 - p_ + p_ * s; }
  double omp(double t) const override { return p_ * t; }
  double pgf_derivative(double) const override { return p_; }
  SeriesValue pgf_extended(double t) const override {
    return SeriesValue::exact(1.0 - p_ + p_ * t);
  }
  SeriesValue mean() const override { return SeriesValue::exact(p_); }
  SeriesValue factorial2() const override { return SeriesValue::exact(0.0); }
  int64_t quantile(double u) const override { return u < 1.0 - p_ ? 0 : 1; }
  const Decay& decay() const override { return d_; }
  std::string literal() const override { return "bernoulli:" + fmt_num(p_); }

 private:
  double p_;
  Decay d_;
};

class GeometricImpl final : public LawImpl {
 public:
  explicit GeometricImpl(double p) : p_(p) {
    require(p >= 0.0 && p < 1.0, "geometric: p outside [0,1)");
    if (p_ == 0.0) {
      d_.kind = Decay::Kind::bounded;
      d_.support_max = 0;
    } else {
      d_.kind = Decay::Kind::geometric;
      d_.rate = p_;
      d_.coeff = 1.0;
      d_.coeff_lo = d_.coeff_hi = 1.0;
      d_.valid_from = 0;
    }
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return -std::expm1(static_cast<double>(k + 1) * std::log(p_ == 0.0 ? 0.0 : p_));
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    return std::pow(p_, static_cast<double>(k));
  }
  double pmf(int64_t k) const override {
    if (k < 0) return 0.0;
    return (1.0 - p_) * std::pow(p_, static_cast<double>(k));
  }
  double pgf_point(double s) const override { return (1.0 - p_) / (1.0 - p_ * s); }
  double omp(double t) const override { return p_ * t / (1.0 - p_ + p_ * t); }
  double pgf_derivative(double s) const override {
    double den = 1.0 - p_ * s;
    return (1.0 - p_) * p_ / (den * den);
  }
  SeriesValue pgf_extended(double t) const override {
    if (p_ * t >= 1.0) return SeriesValue::make_infinite();
    return SeriesValue::exact((1.0 - p_) / (1.0 - p_ * t));
  }
  SeriesValue mean() const override { return SeriesValue::exact(p_ / (1.0 - p_)); }
  SeriesValue factorial2() const override {
    return SeriesValue::exact(2.0 * p_ * p_ / ((1.0 - p_) * (1.0 - p_)));
  }
  int64_t quantile(double u) const override {
    if (p_ == 0.0 || u < 1.0 - p_) return 0;
    int64_t k = static_cast<int64_t>(std::floor(std::log1p(-u) / std::log(p_)));
    if (k < 0) k = 0;
    while (cdf(k) <= u) ++k;
    while (k > 0 && cdf(k - 1) > u) --k;
    return k;
  }
  const Decay& decay() const override { return d_; }
  std::string literal() const override { return "geom:" + fmt_num(p_); }

 private:
  double p_;
  Decay d_;
};

class BinomialImpl final : public LawImpl {
 public:
  BinomialImpl(int64_t n, double p) : n_(n), p_(p) {
    require(n >= 0 && n <= (1 << 20), "binomial: n outside [0, 2^20]");
    require(p >= 0.0 && p <= 1.0, "binomial: p outside [0,1]");
    pmf_.resize(n_ + 1);
    cdf_.resize(n_ + 1);
    // log-space recurrence keeps small tails accurate
    double lp = std::log(p_), lq = std::log1p(-p_);
    for (int64_t k = 0; k <= n_; ++k) {
      double lg = std::lgamma(n_ + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n_ - k + 1.0);
      double lv = lg + (p_ > 0.0 ? k * lp : (k == 0 ? 0.0 : -kInf)) +
                  (p_ < 1.0 ? (n_ - k) * lq : (k == n_ ? 0.0 : -kInf));
      pmf_[k] = std::exp(lv);
    }
    double run = 0.0;
    for (int64_t k = 0; k <= n_; ++k) {
      run += pmf_[k];
      cdf_[k] = std::min(1.0, run);
    }
    cdf_[n_] = 1.0;
    d_.kind = Decay::Kind::bounded;
    d_.support_max = n_;
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return k >= n_ ? 1.0 : cdf_[k];
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    return k > n_ ? 0.0 : 1.0 - cdf_[k - 1];
  }
  double pmf(int64_t k) const override { return (k < 0 || k > n_) ? 0.0 : pmf_[k]; }
  double pgf_point(double s) const override {
    return std::pow(1.0 - p_ + p_ * s, static_cast<double>(n_));
  }
  double omp(double t) const override {
    return -std::expm1(static_cast<double>(n_) * std::log1p(-p_ * t));
  }
  double pgf_derivative(double s) const override {
    if (n_ == 0) return 0.0;
    return n_ * p_ * std::pow(1.0 - p_ + p_ * s, static_cast<double>(n_ - 1));
  }
  SeriesValue pgf_extended(double t) const override {
    double v = std::pow(1.0 - p_ + p_ * t, static_cast<double>(n_));
    if (!std::isfinite(v)) return SeriesValue::make_infinite();
    return SeriesValue::exact(v);
  }
  SeriesValue mean() const override { return SeriesValue::exact(n_ * p_); }
  SeriesValue factorial2() const override {
    return SeriesValue::exact(static_cast<double>(n_) * (n_ - 1) * p_ * p_);
  }
  int64_t quantile(double u) const override {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return it == cdf_.end() ? n_ : static_cast<int64_t>(it - cdf_.begin());
  }
  const Decay& decay() const override { return d_; }
  std::string literal() const override {
    return "binom:" + std::to_string(n_) + ":" + fmt_num(p_);
  }

 private:
  int64_t n_;
  double p_;
  std::vector<double> pmf_, cdf_;
  Decay d_;
};

// P(X = k) = 2/((k+2)(k+3)) on k >= 0; tail(k) = 2/(k+2), harmonic mean
// behaviour: E X = infinity while n P(X >= n) -> 2.
class HarmonicTailExampleImpl final : public LawImpl {
 public:
  HarmonicTailExampleImpl() {
    d_.kind = Decay::Kind::power;
    d_.exponent = 1.0;
    d_.coeff = 2.0;
    d_.valid_from = 8;
    d_.coeff_lo = 2.0 * 8.0 / 10.0;
    d_.coeff_hi = 2.0;
    d_.has_shift_envelope = true;
    d_.shift_lo = 2.0;
    d_.shift_hi = 2.0;
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return 1.0 - 2.0 / static_cast<double>(k + 3);
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    return 2.0 / static_cast<double>(k + 2);
  }
  double pmf(int64_t k) const override {
    if (k < 0) return 0.0;
    return 2.0 / (static_cast<double>(k + 2) * static_cast<double>(k + 3));
  }
  double pgf_point(double s) const override {
    require(s >= 0.0 && s <= 1.0, "pgf_point: s outside [0,1]");
    if (s == 1.0) return 1.0;
    if (s < 0.75) {
      NeumaierSum acc;
      double sk = 1.0;
      for (int64_t k = 0; sk > 1e-18; ++k) {
        acc.add(pmf(k) * sk);
        sk *= s;
      }
      return acc.value();
    }
    // 2[ -(1-s) ln(1/(1-s)) + s - s^2/2 ] / s^3
    double A = -std::log1p(-s);
    return 2.0 * (-(1.0 - s) * A + s - 0.5 * s * s) / (s * s * s);
  }
  double omp(double t) const override {
    require(t >= 0.0 && t <= 1.0, "omp: t outside [0,1]");
    if (t <= 0.0) return 0.0;
    double w = 1.0 - t;
    // 1 - pgf(1-t) = 2t [ln(1/t) - w - w^2/2] / w^3; the bracket equals
    // sum_{m>=3} w^m/m, summed directly when w is small.
    double bracket;
    if (w < 0.5) {
      NeumaierSum acc;
      double wm = w * w * w;
      for (int64_t m = 3; wm > 1e-20; ++m) {
        acc.add(wm / static_cast<double>(m));
        wm *= w;
      }
      bracket = acc.value();
    } else {
      bracket = std::log(1.0 / t) - w - 0.5 * w * w;
    }
    if (w == 0.0) return 2.0 / 3.0;
    return std::min(1.0, 2.0 * t * bracket / (w * w * w));
  }
  SeriesValue pgf_extended(double t) const override {
    if (t > 1.0) return SeriesValue::make_infinite();
    if (t == 1.0) return SeriesValue::exact(1.0);
    return {pgf_point(t), 1e-15, false};
  }
  SeriesValue mean() const override { return SeriesValue::make_infinite(); }
  SeriesValue factorial2() const override { return SeriesValue::make_infinite(); }
  int64_t quantile(double u) const override {
    // smallest k with k+3 > 2/(1-u)
    double x = 2.0 / (1.0 - u) - 3.0;
    int64_t k = x <= 0.0 ? 0 : static_cast<int64_t>(std::floor(x));
    if (k < 0) k = 0;
    while (cdf(k) <= u) ++k;
    while (k > 0 && cdf(k - 1) > u) --k;
    return k;
  }
  const Decay& decay() const override { return d_; }
  std::string literal() const override { return "powerlaw-ex"; }

 private:
  Decay d_;
};

// tail(k) = min(cap, c / ((k+shift)^a (ln(k+shift))^b1 (lnln(k+shift))^b2)),
// tail(0) = 1.
class TailPowerImpl final : public LawImpl {
 public:
  TailPowerImpl(double c, double a, double shift, double cap, double b1, double b2)
      : c_(c), a_(a), shift_(shift), cap_(cap), b1_(b1), b2_(b2) {
    require(c > 0.0, "tail law: c must be positive");
    require(a > 0.0, "tail law: exponent must be positive");
    require(cap > 0.0 && cap <= 1.0, "tail law: cap outside (0,1]");
    require(b1 >= 0.0 && b2 >= 0.0, "tail law: log exponents must be non-negative");
    require(shift > -2.0, "tail law: shift too negative");
    x_min_ = b2_ > 0.0 ? 16.0 : (b1_ > 0.0 ? 3.0 : 1e-300);

    d_.kind = Decay::Kind::power;
    d_.exponent = a_;
    d_.log_exp = b1_;
    d_.loglog_exp = b2_;
    d_.coeff = c_;
    // first k where the formula drops below cap
    int64_t from = 1;
    while (raw(from) >= cap_ && from < (1 << 22)) ++from;
    from = std::max<int64_t>(from, 8);
    d_.valid_from = from;
    double rlo = 1.0, rhi = 1.0;  // bounds on tail(k) / (c * base(k)) for k >= from
    for (int64_t k = from; k <= from * 4; k += std::max<int64_t>(1, from / 4)) {
      double ratio = tail_at(k) / (c_ * d_.base(k));
      rlo = std::min(rlo, ratio);
      rhi = std::max(rhi, ratio);
    }
    // ratio -> 1 monotonically once x dominates shift; pad for safety
    d_.coeff_lo = c_ * std::min(rlo, 1.0) * 0.999;
    d_.coeff_hi = c_ * std::max(rhi, 1.0) * 1.001;
    if (a_ == 1.0 && b1_ == 0.0 && b2_ == 0.0) {
      d_.has_shift_envelope = true;
      d_.shift_lo = shift_;
      d_.shift_hi = shift_;
    }
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return 1.0 - tail_at(k + 1);
  }
  double tail(int64_t k) const override { return tail_at(k); }
  double pgf_derivative(double s) const override { return LawImpl::pgf_derivative(s); }
  int64_t quantile(double u) const override {
    if (b1_ == 0.0 && b2_ == 0.0) {
      // smallest k with tail(k+1) < 1-u
      double target = 1.0 - u;
      if (cap_ < target) return 0;
      double x = std::pow(c_ / target, 1.0 / a_) - shift_;
      int64_t k = x <= 1.0 ? 0 : static_cast<int64_t>(std::floor(x));
      if (k < 0) k = 0;
      while (cdf(k) <= u) ++k;
      while (k > 0 && cdf(k - 1) > u) --k;
      return k;
    }
    return quantile_by_search(u);
  }
  const Decay& decay() const override { return d_; }
  std::string literal() const override {
    std::string s;
    if (b1_ == 0.0 && b2_ == 0.0)
      s = "tail:pow:" + fmt_num(c_) + "," + fmt_num(a_);
    else
      s = "tail:powlog:" + fmt_num(c_) + "," + fmt_num(a_) + "," + fmt_num(b1_) + "," +
          fmt_num(b2_);
    if (shift_ != 0.0 || cap_ != 1.0) s += "," + fmt_num(shift_);
    if (cap_ != 1.0) s += "," + fmt_num(cap_);
    return s;
  }

 private:
  double raw(int64_t k) const {
    double x = static_cast<double>(k) + shift_;
    if (x < x_min_ || x <= 0.0) return kInf;
    double v = c_ * std::pow(x, -a_);
    if (b1_ != 0.0) v *= std::pow(std::log(x), -b1_);
    if (b2_ != 0.0) v *= std::pow(std::log(std::log(x)), -b2_);
    return v;
  }
  double tail_at(int64_t k) const {
    if (k <= 0) return 1.0;
    return std::min(cap_, raw(k));
  }

  double c_, a_, shift_, cap_, b1_, b2_, x_min_;
  Decay d_;
};

// tail(k) = min(cap, coeff * r^k) for k >= 1, tail(0) = 1.
class TailGeometricImpl final : public LawImpl {
 public:
  TailGeometricImpl(double coeff, double r, double cap) : c_(coeff), r_(r), cap_(cap) {
    require(coeff > 0.0, "tail law: coeff must be positive");
    require(r > 0.0 && r < 1.0, "tail law: rate outside (0,1)");
    require(cap > 0.0 && cap <= 1.0, "tail law: cap outside (0,1]");
    d_.kind = Decay::Kind::geometric;
    d_.rate = r_;
    d_.coeff = c_;
    d_.coeff_lo = d_.coeff_hi = c_;
    int64_t from = 1;
    while (c_ * std::pow(r_, static_cast<double>(from)) >= cap_ && from < (1 << 22)) ++from;
    d_.valid_from = from;
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return 1.0 - tail(k + 1);
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    return std::min(cap_, c_ * std::pow(r_, static_cast<double>(k)));
  }
  int64_t quantile(double u) const override { return quantile_by_search(u); }
  const Decay& decay() const override { return d_; }
  std::string literal() const override {
    std::string s = "tail:geom:" + fmt_num(c_) + "," + fmt_num(r_);
    if (cap_ != 1.0) s += "," + fmt_num(cap_);
    return s;
  }

 private:
  double c_, r_, cap_;
  Decay d_;
};

// Finite pmf table on 0..K plus an explicit continuation describing
// P(X >= k) for k > K. The continuation must meet the table: its value at
// K+1 has to equal the untabulated mass.
class TabulatedImpl final : public LawImpl {
 public:
  enum class Beyond { zero, power, geometric };

  TabulatedImpl(std::vector<double> probs, Beyond beyond, double c, double a, double shift,
                double r)
      : probs_(std::move(probs)), beyond_(beyond), c_(c), a_(a), shift_(shift), r_(r) {
    require(!probs_.empty(), "tabulated law: empty table");
    double run = 0.0;
    cum_.resize(probs_.size());
    for (size_t i = 0; i < probs_.size(); ++i) {
      require(probs_[i] >= -1e-15, "tabulated law: negative mass");
      run += probs_[i];
      cum_[i] = run;
    }
    require(run <= 1.0 + 1e-12, "tabulated law: mass exceeds 1");
    double rest = std::max(0.0, 1.0 - run);
    int64_t kmax = static_cast<int64_t>(probs_.size()) - 1;
    switch (beyond_) {
      case Beyond::zero:
        require(rest <= 1e-9, "tabulated law: table mass must reach 1 for tail=zero");
        d_.kind = Decay::Kind::bounded;
        d_.support_max = kmax;
        break;
      case Beyond::power: {
        double at = beyond_tail(kmax + 1);
        require(std::abs(at - rest) <= 1e-9,
                "tabulated law: tail continuation does not match remaining mass");
        d_.kind = Decay::Kind::power;
        d_.exponent = a_;
        d_.coeff = c_;
        d_.coeff_lo = d_.coeff_hi = c_;  // refined below via shift envelope
        d_.valid_from = kmax + 1;
        double klo = static_cast<double>(kmax + 1);
        d_.coeff_lo = c_ * std::pow(klo / (klo + std::max(shift_, 0.0)), a_) * 0.999;
        d_.coeff_hi = shift_ >= 0.0 ? c_ : c_ * std::pow(klo / (klo + shift_), a_) * 1.001;
        if (a_ == 1.0) {
          d_.has_shift_envelope = true;
          d_.shift_lo = d_.shift_hi = shift_;
        }
        break;
      }
      case Beyond::geometric: {
        double at = beyond_tail(kmax + 1);
        require(std::abs(at - rest) <= 1e-9,
                "tabulated law: tail continuation does not match remaining mass");
        d_.kind = Decay::Kind::geometric;
        d_.rate = r_;
        d_.coeff = c_;
        d_.coeff_lo = d_.coeff_hi = c_;
        d_.valid_from = kmax + 1;
        break;
      }
    }
    // continuation must not exceed the tabulated remainder anywhere
    for (int64_t k = kmax + 1; k <= kmax + 4; ++k)
      require(beyond_tail(k) <= rest + 1e-9, "tabulated law: tail continuation not dominated");
  }

  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    if (k < static_cast<int64_t>(cum_.size())) return std::min(1.0, cum_[k]);
    return 1.0 - beyond_tail(k + 1);
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    if (k <= static_cast<int64_t>(cum_.size())) return std::max(0.0, 1.0 - cum_[k - 1]);
    return beyond_tail(k);
  }
  int64_t quantile(double u) const override {
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    if (it != cum_.end()) return static_cast<int64_t>(it - cum_.begin());
    return quantile_by_search(u);
  }
  const Decay& decay() const override { return d_; }
  std::string literal() const override {
    std::string s = "table:[";
    for (size_t i = 0; i < probs_.size(); ++i) {
      if (i) s += ",";
      s += fmt_num(probs_[i]);
    }
    s += "];tail=";
    switch (beyond_) {
      case Beyond::zero: s += "zero"; break;
      case Beyond::power:
        s += "pow:" + fmt_num(c_) + "," + fmt_num(a_);
        if (shift_ != 0.0) s += "," + fmt_num(shift_);
        break;
      case Beyond::geometric: s += "geom:" + fmt_num(c_) + "," + fmt_num(r_); break;
    }
    return s;
  }

 private:
  double beyond_tail(int64_t k) const {
    switch (beyond_) {
      case Beyond::zero: return 0.0;
      case Beyond::power: {
        double x = static_cast<double>(k) + shift_;
        if (x <= 0.0) return 1.0;
        return c_ * std::pow(x, -a_);
      }
      case Beyond::geometric: return c_ * std::pow(r_, static_cast<double>(k));
    }
    return 0.0;
  }

  std::vector<double> probs_, cum_;
  Beyond beyond_;
  double c_, a_, shift_, r_;
  Decay d_;
};

// Law defined by an arbitrary non-increasing tail callback; used for
// constructed pairs where no standard family applies.
class TailFunctionImpl final : public LawImpl {
 public:
  TailFunctionImpl(std::function<double(int64_t)> tail, Decay d, std::string literal)
      : fn_(std::move(tail)), d_(d), literal_(std::move(literal)) {
    require(static_cast<bool>(fn_), "tail function law: empty callback");
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return 1.0 - tail(k + 1);
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    return std::clamp(fn_(k), 0.0, 1.0);
  }
  const Decay& decay() const override { return d_; }
  std::string literal() const override { return literal_; }

 private:
  std::function<double(int64_t)> fn_;
  Decay d_;
  std::string literal_;
};

Decay compose_station_decay(const Law& stations, const Decay& dr);

// Effective one-shot radius of a site holding N independent stations: zero
// when N = 0, otherwise the maximum of N radius draws. Its cdf composes the
// station profile's pgf with the radius cdf.
class MaxOfStationsImpl final : public LawImpl {
 public:
  MaxOfStationsImpl(Law stations, Law radius)
      : n_(std::move(stations)), r_(std::move(radius)) {
    d_ = compose_station_decay(n_, r_.decay());
  }
  double cdf(int64_t k) const override {
    if (k < 0) return 0.0;
    return 1.0 - n_.omp(r_.tail(k + 1));
  }
  double tail(int64_t k) const override {
    if (k <= 0) return 1.0;
    return n_.omp(r_.tail(k));
  }
  const Decay& decay() const override { return d_; }
  std::string literal() const override {
    return "annealed(" + n_.literal() + ";" + r_.literal() + ")";
  }
  const Law& stations() const { return n_; }
  const Law& radius() const { return r_; }

 private:
  Law n_, r_;
  Decay d_;
};

inline Decay compose_station_decay(const Law& stations, const Decay& dr) {
  Decay out;
  SeriesValue en = stations.mean();
  if (dr.kind == Decay::Kind::bounded) {
    out.kind = Decay::Kind::bounded;
    out.support_max = dr.support_max;
    return out;
  }
  if (en.infinite || !std::isfinite(en.value) || std::isnan(en.value)) {
    out.kind = Decay::Kind::unknown;  // heavier than the base law; settled elsewhere
    return out;
  }
  double mean_n = en.value;
  if (mean_n <= 0.0) {  // N = 0 a.s.: the effective radius is 0
    out.kind = Decay::Kind::bounded;
    out.support_max = 0;
    return out;
  }
  SeriesValue f2 = stations.factorial2();
  // mean_n * t * (1 - D t) <= omp(t) <= mean_n * t with D = E N(N-1) / (2 E N)
  double D = f2.infinite ? kInf : f2.value / (2.0 * mean_n);
  out.kind = dr.kind;
  out.rate = dr.rate;
  out.exponent = dr.exponent;
  out.log_exp = dr.log_exp;
  out.loglog_exp = dr.loglog_exp;
  out.coeff = std::isnan(dr.coeff) ? kNaN : mean_n * dr.coeff;
  out.coeff_hi = mean_n * dr.coeff_hi;
  if (!std::isfinite(D)) {
    out.coeff_lo = 0.0;  // no usable second-moment control
    out.valid_from = dr.valid_from;
    return out;
  }
  // pick a start where D * tail <= 1/2
  int64_t from = std::max<int64_t>(dr.valid_from, 1);
  double thi = dr.coeff_hi * dr.base(std::max<int64_t>(from, 2));
  while (std::isfinite(thi) && D * thi > 0.5 && from < (1 << 24)) {
    from *= 2;
    thi = dr.coeff_hi * dr.base(from);
  }
  out.valid_from = from;
  out.coeff_lo = mean_n * dr.coeff_lo * 0.5;
  if (dr.has_shift_envelope && dr.exponent == 1.0) {
    double c = dr.coeff;
    double eps_den = static_cast<double>(from) + dr.shift_lo - D * c;
    if (eps_den > 0.0) {
      double kappa =
          std::max(1.0, (static_cast<double>(from) + dr.shift_hi) / eps_den);
      out.has_shift_envelope = true;
      out.shift_lo = dr.shift_lo;
      out.shift_hi = dr.shift_hi + D * c * kappa;
      // envelope now refers to coeff = mean_n * c; tighten coeff_lo accordingly
      out.coeff_lo =
          mean_n * c * static_cast<double>(from) / (static_cast<double>(from) + out.shift_hi);
    }
  }
  return out;
}

}  // namespace detail

inline Law Law::point_mass(int64_t c) {
  return Law(std::make_shared<detail::PointMassImpl>(c));
}
inline Law Law::bernoulli(double p) {
  return Law(std::make_shared<detail::BernoulliImpl>(p));
}
inline Law Law::geometric(double p) {
  return Law(std::make_shared<detail::GeometricImpl>(p));
}
inline Law Law::binomial(int64_t n, double p) {
  return Law(std::make_shared<detail::BinomialImpl>(n, p));
}
inline Law Law::power_law_example() {
  return Law(std::make_shared<detail::HarmonicTailExampleImpl>());
}
inline Law Law::tail_power(double c, double a, double shift, double cap, double log_exp,
                           double loglog_exp) {
  return Law(std::make_shared<detail::TailPowerImpl>(c, a, shift, cap, log_exp, loglog_exp));
}
inline Law Law::tail_geometric(double coeff, double r, double cap) {
  return Law(std::make_shared<detail::TailGeometricImpl>(coeff, r, cap));
}
inline Law Law::tabulated_zero(std::vector<double> probs) {
  return Law(std::make_shared<detail::TabulatedImpl>(
      std::move(probs), detail::TabulatedImpl::Beyond::zero, 0, 0, 0, 0));
}
inline Law Law::tabulated_power(std::vector<double> probs, double c, double a, double shift) {
  return Law(std::make_shared<detail::TabulatedImpl>(
      std::move(probs), detail::TabulatedImpl::Beyond::power, c, a, shift, 0));
}
inline Law Law::tabulated_geometric(std::vector<double> probs, double coeff, double r) {
  return Law(std::make_shared<detail::TabulatedImpl>(
      std::move(probs), detail::TabulatedImpl::Beyond::geometric, coeff, 0, 0, r));
}
inline Law Law::from_tail_function(std::function<double(int64_t)> tail, Decay decay,
                                   std::string literal) {
  return Law(std::make_shared<detail::TailFunctionImpl>(std::move(tail), decay,
                                                        std::move(literal)));
}

// Law of the effective radius at a site with a random number of stations.
inline Law annealed_radius(const Law& stations, const Law& radius) {
  return Law(std::make_shared<detail::MaxOfStationsImpl>(stations, radius));
}

// -------------------------------------------------------------------------
// Literal parsing. Grammar (described in the README):
//   point:C | bernoulli:P | geom:P | binom:N:P | powerlaw-ex
//   tail:pow:C,A[,SHIFT[,CAP]] | tail:powlog:C,A,B1,B2[,SHIFT[,CAP]]
//   tail:geom:C,R[,CAP]
//   table:[p0,p1,...];tail=zero | ...;tail=pow:C,A[,SHIFT] | ...;tail=geom:C,R
//   annealed(<stations>;<radius>)

namespace detail {

inline double parse_num(std::string_view s, const std::string& what) {
  try {
    size_t pos = 0;
    std::string str(s);
    double v = std::stod(str, &pos);
    require(pos == str.size(), "law literal: trailing characters in " + what);
    return v;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("law literal: cannot parse number in " + what + ": '" +
                                std::string(s) + "'");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("law literal: number out of range in " + what);
  }
}

inline int64_t parse_int(std::string_view s, const std::string& what) {
  double v = parse_num(s, what);
  int64_t k = static_cast<int64_t>(v);
  require(static_cast<double>(k) == v, "law literal: expected integer in " + what);
  return k;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

inline Law Law::parse(std::string_view text) {
  using detail::parse_int;
  using detail::parse_num;
  using detail::require;
  using detail::split;

  require(!text.empty(), "law literal: empty");

  if (text == "powerlaw-ex") return power_law_example();

  if (text.starts_with("annealed(") && text.ends_with(")")) {
    std::string_view body = text.substr(9, text.size() - 10);
    int depth = 0;
    size_t cut = std::string_view::npos;
    for (size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '(') ++depth;
      if (body[i] == ')') --depth;
      if (body[i] == ';' && depth == 0) {
        cut = i;
        break;
      }
    }
    require(cut != std::string_view::npos, "law literal: annealed needs 'annealed(N;R)'");
    return annealed_radius(parse(body.substr(0, cut)), parse(body.substr(cut + 1)));
  }

  if (text.starts_with("point:")) return point_mass(parse_int(text.substr(6), "point"));
  if (text.starts_with("bernoulli:"))
    return bernoulli(parse_num(text.substr(10), "bernoulli"));
  if (text.starts_with("geom:")) return geometric(parse_num(text.substr(5), "geom"));

  if (text.starts_with("binom:")) {
    auto parts = split(text.substr(6), ':');
    require(parts.size() == 2, "law literal: binom needs 'binom:N:P'");
    return binomial(parse_int(parts[0], "binom"), parse_num(parts[1], "binom"));
  }

  if (text.starts_with("tail:pow:")) {
    auto parts = split(text.substr(9), ',');
    require(parts.size() >= 2 && parts.size() <= 4, "law literal: tail:pow:C,A[,SHIFT[,CAP]]");
    double c = parse_num(parts[0], "tail:pow"), a = parse_num(parts[1], "tail:pow");
    double shift = parts.size() >= 3 ? parse_num(parts[2], "tail:pow") : 0.0;
    double cap = parts.size() >= 4 ? parse_num(parts[3], "tail:pow") : 1.0;
    return tail_power(c, a, shift, cap);
  }

  if (text.starts_with("tail:powlog:")) {
    auto parts = split(text.substr(12), ',');
    require(parts.size() >= 4 && parts.size() <= 6,
            "law literal: tail:powlog:C,A,B1,B2[,SHIFT[,CAP]]");
    double c = parse_num(parts[0], "tail:powlog"), a = parse_num(parts[1], "tail:powlog");
    double b1 = parse_num(parts[2], "tail:powlog"), b2 = parse_num(parts[3], "tail:powlog");
    double shift = parts.size() >= 5 ? parse_num(parts[4], "tail:powlog") : 0.0;
    double cap = parts.size() >= 6 ? parse_num(parts[5], "tail:powlog") : 1.0;
    return tail_power(c, a, shift, cap, b1, b2);
  }

  if (text.starts_with("tail:geom:")) {
    auto parts = split(text.substr(10), ',');
    require(parts.size() >= 2 && parts.size() <= 3, "law literal: tail:geom:C,R[,CAP]");
    double c = parse_num(parts[0], "tail:geom"), r = parse_num(parts[1], "tail:geom");
    double cap = parts.size() >= 3 ? parse_num(parts[2], "tail:geom") : 1.0;
    return tail_geometric(c, r, cap);
  }

  if (text.starts_with("table:")) {
    std::string_view rest = text.substr(6);
    require(rest.starts_with("["), "law literal: table needs '[p0,p1,...]'");
    size_t close = rest.find(']');
    require(close != std::string_view::npos, "law literal: table missing ']'");
    std::vector<double> probs;
    for (auto piece : split(rest.substr(1, close - 1), ','))
      probs.push_back(parse_num(piece, "table"));
    std::string_view after = rest.substr(close + 1);
    require(after.starts_with(";tail="), "law literal: table needs ';tail=...'");
    std::string_view desc = after.substr(6);
    if (desc == "zero") return tabulated_zero(std::move(probs));
    if (desc.starts_with("pow:")) {
      auto parts = split(desc.substr(4), ',');
      require(parts.size() >= 2 && parts.size() <= 3, "law literal: tail=pow:C,A[,SHIFT]");
      double c = parse_num(parts[0], "tail=pow"), a = parse_num(parts[1], "tail=pow");
      double shift = parts.size() >= 3 ? parse_num(parts[2], "tail=pow") : 0.0;
      return tabulated_power(std::move(probs), c, a, shift);
    }
    if (desc.starts_with("geom:")) {
      auto parts = split(desc.substr(5), ',');
      require(parts.size() == 2, "law literal: tail=geom:C,R");
      return tabulated_geometric(std::move(probs), parse_num(parts[0], "tail=geom"),
                                 parse_num(parts[1], "tail=geom"));
    }
    throw std::invalid_argument("law literal: unknown table tail descriptor '" +
                                std::string(desc) + "'");
  }

  throw std::invalid_argument("law literal: unrecognized '" + std::string(text) + "'");
}

// Consistency probes: mass accounting, monotonicity, tail/cdf duality and
// envelope validity. Cheap enough to run at parse boundaries.
inline void law_self_check(const Law& law) {
  using detail::require;
  require(std::abs(law.tail(0) - 1.0) <= 1e-12, "law check: tail(0) != 1");
  require(law.cdf(-1) == 0.0, "law check: cdf(-1) != 0");
  double prev_cdf = -1.0, prev_tail = 2.0;
  for (int64_t k = 0; k <= 64; ++k) {
    double c = law.cdf(k), t = law.tail(k), p = law.pmf(k);
    require(p >= -1e-12, "law check: negative pmf");
    require(c >= prev_cdf - 1e-12, "law check: cdf not monotone");
    require(t <= prev_tail + 1e-12, "law check: tail not monotone");
    require(std::abs(c + law.tail(k + 1) - 1.0) <= 1e-9, "law check: cdf/tail mismatch");
    prev_cdf = c;
    prev_tail = t;
  }
  const Decay& d = law.decay();
  if (d.kind == Decay::Kind::bounded) {
    require(std::abs(law.cdf(d.support_max) - 1.0) <= 1e-9,
            "law check: bounded law mass below 1");
    require(law.tail(d.support_max + 1) <= 1e-12, "law check: bounded law leaks mass");
  } else if (d.kind != Decay::Kind::unknown) {
    for (int64_t k = std::max<int64_t>(d.valid_from, 2); k < d.valid_from + 40; k += 7) {
      double t = law.tail(k), b = d.base(k);
      require(t <= d.coeff_hi * b + 1e-12, "law check: tail above envelope");
      require(t >= d.coeff_lo * b - 1e-12, "law check: tail below envelope");
      if (d.has_shift_envelope) {
        require(t <= d.coeff / (static_cast<double>(k) + d.shift_lo) + 1e-12,
                "law check: tail above shift envelope");
        require(t >= d.coeff / (static_cast<double>(k) + d.shift_hi) - 1e-12,
                "law check: tail below shift envelope");
      }
    }
  }
}

}  // namespace rumor

#endif  // RUMOR_LAW_HPP
