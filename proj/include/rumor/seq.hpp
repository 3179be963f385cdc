#ifndef RUMOR_SEQ_HPP
#define RUMOR_SEQ_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rumor/law.hpp"
#include "rumor/numeric.hpp"

namespace rumor {

// Positive non-increasing null sequences b_0 >= b_1 >= ... -> 0 that drive
// the heterogeneous families. Beyond pointwise values, each kind knows the
// symbolic answers the classification criteria need: whether sum b_n is
// finite, the limit of n b_n, and the limit of the window sum over [n/2, n).
class BSeq {
 public:
  enum class Kind { geometric, power, log_harmonic };

  static BSeq geometric(double c, double r) {
    detail::require(c > 0.0, "b-sequence: c must be positive");
    detail::require(r > 0.0 && r < 1.0, "b-sequence: rate outside (0,1)");
    BSeq b;
    b.kind_ = Kind::geometric;
    b.c_ = c;
    b.r_ = r;
    return b;
  }
  // b_n = c / (n+2)^a
  static BSeq power(double c, double a) {
    detail::require(c > 0.0, "b-sequence: c must be positive");
    detail::require(a > 0.0, "b-sequence: exponent must be positive");
    BSeq b;
    b.kind_ = Kind::power;
    b.c_ = c;
    b.a_ = a;
    return b;
  }
  // b_n = 1 / ((n+2) ln(n+2))
  static BSeq log_harmonic() {
    BSeq b;
    b.kind_ = Kind::log_harmonic;
    return b;
  }

  Kind kind() const { return kind_; }

  double at(int64_t n) const {
    if (n < 0) n = 0;
    double x = static_cast<double>(n) + 2.0;
    switch (kind_) {
      case Kind::geometric: return c_ * std::pow(r_, static_cast<double>(n));
      case Kind::power: return c_ * std::pow(x, -a_);
      case Kind::log_harmonic: return 1.0 / (x * std::log(x));
    }
    return 0.0;
  }

  // sum_{n >= n0} b_n
  SeriesValue sum_from(int64_t n0) const {
    if (n0 < 0) n0 = 0;
    switch (kind_) {
      case Kind::geometric:
        return SeriesValue::exact(c_ * std::pow(r_, static_cast<double>(n0)) / (1.0 - r_));
      case Kind::power: {
        if (a_ <= 1.0) return SeriesValue::make_infinite();
        NeumaierSum s;
        int64_t n = n0;
        for (; n < n0 + 4096; ++n) s.add(at(n));
        // integral bracket on the rest: width is one term
        double lo = c_ * std::pow(static_cast<double>(n) + 2.0, 1.0 - a_) / (a_ - 1.0);
        return {s.value() + lo + 0.5 * at(n), 0.5 * at(n), false};
      }
      case Kind::log_harmonic: return SeriesValue::make_infinite();
    }
    return SeriesValue::make_infinite();
  }

  SeriesValue sum() const { return sum_from(0); }

  // lim n b_n (0, a finite constant, or +inf)
  double limit_n_times() const {
    switch (kind_) {
      case Kind::geometric: return 0.0;
      case Kind::power:
        if (a_ > 1.0) return 0.0;
        if (a_ == 1.0) return c_;
        return kInf;
      case Kind::log_harmonic: return 0.0;
    }
    return kNaN;
  }

  // lim of sum_{k in [ceil(n/2), n)} b_k
  double window_sum_limit() const {
    switch (kind_) {
      case Kind::geometric: return 0.0;
      case Kind::power:
        if (a_ > 1.0) return 0.0;
        if (a_ == 1.0) return c_ * std::log(2.0);
        return kInf;
      case Kind::log_harmonic: return 0.0;
    }
    return kNaN;
  }

  // Decay of the law with tail(k) = b_{n+k-1} for k >= 1 (profile offset n).
  Decay profile_decay(int64_t n) const {
    Decay d;
    switch (kind_) {
      case Kind::geometric:
        d.kind = Decay::Kind::geometric;
        d.rate = r_;
        d.coeff = c_ * std::pow(r_, static_cast<double>(n) - 1.0);
        d.coeff_lo = d.coeff_hi = d.coeff;
        d.valid_from = 1;
        break;
      case Kind::power: {
        d.kind = Decay::Kind::power;
        d.exponent = a_;
        d.coeff = c_;
        d.valid_from = 8;
        double shift = static_cast<double>(n) + 1.0;
        double k0 = static_cast<double>(d.valid_from);
        d.coeff_lo = c_ * std::pow(k0 / (k0 + shift), a_);
        d.coeff_hi = c_;
        if (a_ == 1.0) {
          d.has_shift_envelope = true;
          d.shift_lo = d.shift_hi = shift;
        }
        break;
      }
      case Kind::log_harmonic: {
        d.kind = Decay::Kind::power;
        d.exponent = 1.0;
        d.log_exp = 1.0;
        d.coeff = 1.0;
        d.valid_from = 8;
        // tail(k)/base(k) = k ln k / ((k+n+1) ln(k+n+1)), increasing to 1
        double k0 = static_cast<double>(d.valid_from);
        double x0 = k0 + static_cast<double>(n) + 1.0;
        d.coeff_lo = (k0 * std::log(k0)) / (x0 * std::log(x0));
        d.coeff_hi = 1.0;
        break;
      }
    }
    return d;
  }

  std::string literal() const {
    switch (kind_) {
      case Kind::geometric: return "geom:" + detail::fmt_num(c_) + "," + detail::fmt_num(r_);
      case Kind::power: return "pow:" + detail::fmt_num(c_) + "," + detail::fmt_num(a_);
      case Kind::log_harmonic: return "logharmonic";
    }
    return "?";
  }

  static BSeq parse(std::string_view text) {
    using detail::parse_num;
    using detail::split;
    if (text == "logharmonic") return log_harmonic();
    if (text.starts_with("geom:")) {
      auto parts = split(text.substr(5), ',');
      detail::require(parts.size() == 2, "b-sequence literal: geom:C,R");
      return geometric(parse_num(parts[0], "b-sequence geom"),
                       parse_num(parts[1], "b-sequence geom"));
    }
    if (text.starts_with("pow:")) {
      auto parts = split(text.substr(4), ',');
      detail::require(parts.size() == 2, "b-sequence literal: pow:C,A");
      return power(parse_num(parts[0], "b-sequence pow"),
                   parse_num(parts[1], "b-sequence pow"));
    }
    throw std::invalid_argument("b-sequence literal: unrecognized '" + std::string(text) + "'");
  }

 private:
  Kind kind_ = Kind::log_harmonic;
  double c_ = 0.0, r_ = 0.0, a_ = 0.0;
};

// A law per position n. Four structured kinds plus a constant reduction:
//   constant    R_n ~ law for every n
//   bernoulli   P(R_n = 0) = b_n, P(R_n = 1) = 1 - b_n
//   profile     P(R_n >= k) = b_{n+k-1} for k >= 1
//   spike       P(R_n = n) = b_n, P(R_n = 0) = 1 - b_n
//   alternating R_n ~ even law / odd law by parity of n
class SequenceLaw {
 public:
  enum class Kind { constant, bernoulli, profile, spike, alternating };

  static SequenceLaw constant(Law law) {
    SequenceLaw s;
    s.kind_ = Kind::constant;
    s.law_even_ = std::move(law);
    return s;
  }
  static SequenceLaw bernoulli(BSeq b) {
    detail::require(b.at(0) < 1.0, "sequence law: b_0 must be below 1");
    SequenceLaw s;
    s.kind_ = Kind::bernoulli;
    s.b_ = b;
    return s;
  }
  static SequenceLaw profile(BSeq b) {
    detail::require(b.at(0) < 1.0, "sequence law: b_0 must be below 1");
    SequenceLaw s;
    s.kind_ = Kind::profile;
    s.b_ = b;
    return s;
  }
  static SequenceLaw spike(BSeq b) {
    detail::require(b.at(0) < 1.0, "sequence law: b_0 must be below 1");
    SequenceLaw s;
    s.kind_ = Kind::spike;
    s.b_ = b;
    return s;
  }
  static SequenceLaw alternating(Law even, Law odd) {
    SequenceLaw s;
    s.kind_ = Kind::alternating;
    s.law_even_ = std::move(even);
    s.law_odd_ = std::move(odd);
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::constant; }
  const Law& constant_law() const {
    detail::require(kind_ == Kind::constant, "sequence law: not constant");
    return law_even_;
  }
  const BSeq& bseq() const {
    detail::require(kind_ == Kind::bernoulli || kind_ == Kind::profile || kind_ == Kind::spike,
                    "sequence law: no driving b-sequence");
    return b_;
  }

  double tail_at(int64_t n, int64_t k) const {
    if (k <= 0) return 1.0;
    switch (kind_) {
      case Kind::constant: return law_even_.tail(k);
      case Kind::bernoulli: return k == 1 ? 1.0 - b_.at(n) : 0.0;
      case Kind::profile: return b_.at(n + k - 1);
      case Kind::spike: return k <= n ? b_.at(n) : 0.0;
      case Kind::alternating: return (n % 2 == 0 ? law_even_ : law_odd_).tail(k);
    }
    return 0.0;
  }
  double cdf_at(int64_t n, int64_t k) const { return 1.0 - tail_at(n, k + 1); }

  Law law_at(int64_t n) const {
    switch (kind_) {
      case Kind::constant: return law_even_;
      case Kind::bernoulli: return Law::bernoulli(1.0 - b_.at(n));
      case Kind::profile: {
        BSeq b = b_;
        Decay d = b.profile_decay(n);
        return Law::from_tail_function([b, n](int64_t k) { return b.at(n + k - 1); }, d,
                                       "seqlaw(profile:" + b.literal() +
                                           ",n=" + std::to_string(n) + ")");
      }
      case Kind::spike: {
        if (n == 0) return Law::point_mass(0);
        double bn = b_.at(n);
        Decay d;
        d.kind = Decay::Kind::bounded;
        d.support_max = n;
        return Law::from_tail_function([bn, n](int64_t k) { return k <= n ? bn : 0.0; }, d,
                                       "seqlaw(spike:" + b_.literal() +
                                           ",n=" + std::to_string(n) + ")");
      }
      case Kind::alternating: return n % 2 == 0 ? law_even_ : law_odd_;
    }
    return Law();
  }

  std::string literal() const {
    switch (kind_) {
      case Kind::constant: return "seq:const:" + law_even_.literal();
      case Kind::bernoulli: return "seq:bernoulli:" + b_.literal();
      case Kind::profile: return "seq:profile:" + b_.literal();
      case Kind::spike: return "seq:spike:" + b_.literal();
      case Kind::alternating:
        return "seq:alt:" + law_even_.literal() + "|" + law_odd_.literal();
    }
    return "?";
  }

  static SequenceLaw parse(std::string_view text) {
    detail::require(text.starts_with("seq:"), "sequence literal: must start with 'seq:'");
    std::string_view rest = text.substr(4);
    if (rest.starts_with("const:")) return constant(Law::parse(rest.substr(6)));
    if (rest.starts_with("bernoulli:")) return bernoulli(BSeq::parse(rest.substr(10)));
    if (rest.starts_with("profile:")) return profile(BSeq::parse(rest.substr(8)));
    if (rest.starts_with("spike:")) return spike(BSeq::parse(rest.substr(6)));
    if (rest.starts_with("alt:")) {
      std::string_view body = rest.substr(4);
      size_t cut = body.find('|');
      detail::require(cut != std::string_view::npos, "sequence literal: alt needs 'alt:L1|L2'");
      return alternating(Law::parse(body.substr(0, cut)), Law::parse(body.substr(cut + 1)));
    }
    throw std::invalid_argument("sequence literal: unrecognized '" + std::string(text) + "'");
  }

 private:
  Kind kind_ = Kind::constant;
  Law law_even_, law_odd_;
  BSeq b_ = BSeq::log_harmonic();
};

}  // namespace rumor

#endif  // RUMOR_SEQ_HPP
