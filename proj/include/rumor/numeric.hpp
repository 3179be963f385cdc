#ifndef RUMOR_NUMERIC_HPP
#define RUMOR_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace rumor {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Normal quantiles used throughout: 97.5% (two-sided 95%), 99.5% (two-sided
// 99%), one-sided 99%.
inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;
inline constexpr double kZ99OneSided = 2.3263478740408408;

// A numerically evaluated series or product: value plus a rigorous bound on
// the truncation remainder, or a divergence flag.
struct SeriesValue {
  double value = 0.0;
  double remainder = 0.0;  // |true - value| <= remainder when finite
  bool infinite = false;

  static SeriesValue make_infinite() { return {kInf, 0.0, true}; }
  static SeriesValue exact(double v) { return {v, 0.0, false}; }
  bool finite() const { return !infinite; }
};

// Neumaier compensated summation; order-sensitive, so callers that need
// scheduling-independent totals must feed values in a fixed order.
class NeumaierSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for a binomial proportion.
inline ConfidenceInterval wilson_interval(std::int64_t successes, std::int64_t n,
                                          double z = kZ95) {
  if (n <= 0) return {0.0, 1.0};
  double phat = static_cast<double>(successes) / static_cast<double>(n);
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  double lo = center - half, hi = center + half;
  if (lo < 0.0) lo = 0.0;
  if (hi > 1.0) hi = 1.0;
  return {lo, hi};
}

// Two-proportion z statistic with pooled variance. Returns 0 when both
// samples are degenerate.
inline double two_proportion_z(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                               std::int64_t n2) {
  if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("two_proportion_z: empty sample");
  double p1 = static_cast<double>(k1) / n1;
  double p2 = static_cast<double>(k2) / n2;
  double pool = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  double var = pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n2);
  if (var <= 0.0) return (p1 == p2) ? 0.0 : kInf;
  return (p1 - p2) / std::sqrt(var);
}

// 99th percentile of the chi-square distribution via the Wilson-Hilferty cube
// approximation; relative error under 0.2% for df >= 5, adequate as a test
// gate together with the margins built into the tests that use it.
inline double chi2_quantile_99(int df) {
  if (df <= 0) throw std::invalid_argument("chi2_quantile_99: df must be positive");
  double d = static_cast<double>(df);
  double h = 2.0 / (9.0 * d);
  double x = 1.0 - h + kZ99OneSided * std::sqrt(h);
  return d * x * x * x;
}

}  // namespace rumor

#endif  // RUMOR_NUMERIC_HPP
