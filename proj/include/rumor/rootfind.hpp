#ifndef RUMOR_ROOTFIND_HPP
#define RUMOR_ROOTFIND_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace rumor {

struct FixedPointResult {
  double value = 0.0;
  std::int64_t iterations = 0;
  double residual = 0.0;  // |g(value) - value| at exit
  bool converged = false;
};

// Smallest fixed point of a non-decreasing g: [0,1] -> [0,1], found by
// iterating from 0. The iterate sequence is non-decreasing and bounded by
// every fixed point, so its limit is the smallest one. Convergence is
// declared on increment < tol; near a tangency the value error can be much
// larger than tol even though the residual is tiny, so callers that need a
// guarantee should look at `residual`, not assume |value - limit| < tol.
inline FixedPointResult smallest_fixed_point(const std::function<double(double)>& g,
                                             double tol = 1e-12,
                                             std::int64_t max_iter = 2000000) {
  if (!(tol > 0.0)) throw std::invalid_argument("smallest_fixed_point: tol must be positive");
  FixedPointResult out;
  double t = 0.0;
  for (std::int64_t n = 0; n < max_iter; ++n) {
    double next = g(t);
    if (!(next >= -1e-12 && next <= 1.0 + 1e-12))
      throw std::logic_error("smallest_fixed_point: map left [0,1]");
    if (next < t - 1e-15)
      throw std::logic_error("smallest_fixed_point: iterates decreased; map not monotone from 0");
    double inc = next - t;
    t = std::min(next, 1.0);
    out.iterations = n + 1;
    if (inc < tol) {
      out.converged = true;
      break;
    }
  }
  out.value = t;
  out.residual = std::abs(g(t) - t);
  return out;
}

// Boundary of a monotone predicate: smallest x in [lo, hi] with pred(x)
// true, located to within xtol by bisection. pred(hi) must hold.
inline double monotone_boundary(const std::function<bool(double)>& pred, double lo, double hi,
                                double xtol = 1e-13) {
  if (!(lo <= hi)) throw std::invalid_argument("monotone_boundary: empty interval");
  if (pred(lo)) return lo;
  if (!pred(hi)) throw std::invalid_argument("monotone_boundary: predicate false on whole interval");
  while (hi - lo > xtol) {
    double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // interval narrower than spacing
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace rumor

#endif  // RUMOR_ROOTFIND_HPP
