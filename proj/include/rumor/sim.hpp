#ifndef RUMOR_SIM_HPP
#define RUMOR_SIM_HPP

// Monte Carlo engine for the discrete spread models: direct and reverse
// relay processes on the half line (homogeneous, position-dependent, or with
// station-count environments) and cone / disk / reverse spread on trees with
// lazily sampled structure. Every random draw is keyed by (trial, site, salt)
// through TrialRng, so trials are reproducible under any scheduling and
// shared-randomness couplings across laws are exact.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rumor/law.hpp"
#include "rumor/numeric.hpp"
#include "rumor/rng.hpp"
#include "rumor/seq.hpp"
#include "rumor/tree.hpp"

namespace rumor {

enum class TrialStatus { died, survived_to_horizon, dead_by_residual, truncated };

inline const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::died:
      return "died";
    case TrialStatus::survived_to_horizon:
      return "survived_to_horizon";
    case TrialStatus::dead_by_residual:
      return "dead_by_residual";
    default:
      return "truncated";
  }
}

// Summary of one realization. `spreaders` counts sites that relayed (for the
// reverse process: sites that heard, the origin excluded); `informed` counts
// vertices holding the rumor inside the window, origin included; `reach` is
// the maximal distance/depth attained. On survival the counts are censored at
// the point the horizon was certified. residual_mass is the analytic upper
// bound on the stalled reverse process ever restarting (reverse line only).
struct TrialOutcome {
  TrialStatus status = TrialStatus::died;
  int64_t spreaders = 0;
  int64_t informed = 0;
  int64_t reach = 0;
  double residual_mass = 0.0;
};

namespace detail {

inline constexpr std::uint32_t kSiteRadiusSalt = 1;
inline constexpr std::uint32_t kStationCountSalt = 3;
inline constexpr std::uint32_t kChildCountSalt = 4;
inline constexpr std::uint32_t kTreeRadiusSalt = 5;

// Quantile sample of the position-n law without building a Law object on the
// hot path. Same convention as Law::quantile: min{k : cdf(k) > u}.
inline int64_t seq_sample(const SequenceLaw& seq, int64_t n, double u) {
  switch (seq.kind()) {
    case SequenceLaw::Kind::constant:
      return seq.constant_law().quantile(u);
    case SequenceLaw::Kind::bernoulli:
      return u < seq.bseq().at(n) ? 0 : 1;
    case SequenceLaw::Kind::spike:
      if (n == 0) return 0;
      return u < 1.0 - seq.bseq().at(n) ? 0 : n;
    case SequenceLaw::Kind::profile: {
      // cdf(k) = 1 - b_{n+k}; b is non-increasing, so double then bisect
      const BSeq& b = seq.bseq();
      double target = 1.0 - u;  // want min k with b_{n+k} < target
      if (b.at(n) < target) return 0;
      int64_t hi = 1;
      while (b.at(n + hi) >= target) {
        hi *= 2;
        require(hi < (int64_t{1} << 60), "sequence sample: quantile overflow");
      }
      int64_t lo = hi / 2;  // b.at(n+lo) >= target
      while (hi - lo > 1) {
        int64_t mid = lo + (hi - lo) / 2;
        (b.at(n + mid) >= target ? lo : hi) = mid;
      }
      return hi;
    }
    case SequenceLaw::Kind::alternating:
      return seq.law_at(n).quantile(u);
  }
  return 0;
}

// Effective radius of a site with a random number of stations: the maximum of
// n independent radius draws has tail 1 - cdf^n, so a single uniform mapped
// through u^(1/n) samples it exactly.
inline int64_t env_effective_radius(const Law& stations, const Law& radius,
                                    const TrialRng& rng, std::uint64_t key,
                                    std::uint32_t radius_salt) {
  int64_t n = stations.sample_keyed(rng, key, kStationCountSalt);
  if (n <= 0) return 0;
  double u = rng.uniform01(key, radius_salt);
  if (n == 1) return radius.quantile(u);
  return radius.quantile(std::pow(u, 1.0 / static_cast<double>(n)));
}

// Upper bound on sum_{j >= j0} tail(j), certified by the decay descriptor.
// Exact for bounded support; +inf when the sum diverges or the descriptor
// cannot pin a summable envelope.
inline double law_tail_sum_from(const Law& law, int64_t j0) {
  const Decay& d = law.decay();
  if (j0 < 1) j0 = 1;
  if (d.kind == Decay::Kind::bounded) {
    NeumaierSum s;
    for (int64_t j = j0; j <= d.support_max; ++j) s.add(law.tail(j));
    return s.value();
  }
  if (!std::isfinite(d.coeff_hi)) return kInf;
  if (d.kind == Decay::Kind::power && d.exponent <= 1.0) return kInf;
  if (d.kind != Decay::Kind::geometric && d.kind != Decay::Kind::power) return kInf;

  NeumaierSum s;
  for (int64_t j = j0; j < j0 + 400000; ++j) {
    s.add(law.tail(j));
    if (j + 1 < d.valid_from) continue;
    double x = static_cast<double>(j) + 1.0;
    double rem;
    if (d.kind == Decay::Kind::geometric) {
      rem = d.coeff_hi * std::pow(d.rate, x) / (1.0 - d.rate);
    } else {
      // sum_{i >= x} i^-e <= x^-e + x^(1-e)/(e-1); log factors only shrink it
      rem = d.coeff_hi *
            (std::pow(x, -d.exponent) + std::pow(x, 1.0 - d.exponent) / (d.exponent - 1.0));
    }
    if (rem <= 1e-4 * s.value() + 1e-18) return s.value() + rem;
  }
  return kInf;
}

enum class ResidualMode { classify, never, opaque };

// Whether the reverse-line stall classifier can ever certify death for this
// radius sequence. `opaque` laws carry no usable tail descriptor and make
// classification an error; `never` sequences have non-summable hearing tails,
// so the restart probability stays 1 and the trial runs to the horizon.
inline ResidualMode residual_mode(const SequenceLaw& seq) {
  auto law_mode = [](const Law& law) {
    const Decay& d = law.decay();
    if (d.kind == Decay::Kind::unknown) return ResidualMode::opaque;
    if (d.kind == Decay::Kind::bounded) return ResidualMode::classify;
    if (!std::isfinite(d.coeff_hi)) return ResidualMode::never;
    if (d.kind == Decay::Kind::power && d.exponent <= 1.0) return ResidualMode::never;
    return ResidualMode::classify;
  };
  switch (seq.kind()) {
    case SequenceLaw::Kind::constant:
      return law_mode(seq.constant_law());
    case SequenceLaw::Kind::bernoulli:
      return ResidualMode::classify;
    case SequenceLaw::Kind::spike:
    case SequenceLaw::Kind::profile:
      return seq.bseq().sum().infinite ? ResidualMode::never : ResidualMode::classify;
    case SequenceLaw::Kind::alternating: {
      ResidualMode a = law_mode(seq.law_at(0)), b = law_mode(seq.law_at(1));
      if (a == ResidualMode::opaque || b == ResidualMode::opaque) return ResidualMode::opaque;
      if (a == ResidualMode::never || b == ResidualMode::never) return ResidualMode::never;
      return ResidualMode::classify;
    }
  }
  return ResidualMode::opaque;
}

// P(some vertex beyond u ever hears | rightmost informed vertex r). Upper
// bound via 1 - prod p <= sum (1 - p); exact zero detection for bounded
// support is what separates hard death from residual classification.
inline double reverse_residual(const SequenceLaw& seq, int64_t u, int64_t r) {
  int64_t gap = u - r;
  switch (seq.kind()) {
    case SequenceLaw::Kind::constant:
      // vertices v > u need radius >= v - r, i.e. tails from gap + 1 on
      return std::min(1.0, law_tail_sum_from(seq.constant_law(), gap + 1));
    case SequenceLaw::Kind::bernoulli:
      // radii are 0/1: only a vertex at distance 1 from r can ever hear
      return gap >= 1 ? 0.0 : std::min(1.0, 1.0 - seq.bseq().at(r + 1));
    case SequenceLaw::Kind::spike: {
      // vertex v hears iff its spike fires (v >= v - r always)
      SeriesValue s = seq.bseq().sum_from(u + 1);
      return s.infinite ? 1.0 : std::min(1.0, s.value + s.remainder);
    }
    case SequenceLaw::Kind::profile: {
      // P(R_v >= v - r) = b_{2v-r-1}; the stride-2 subsequence is dominated
      // by the consecutive sum from its first index
      SeriesValue s = seq.bseq().sum_from(2 * u - r + 1);
      return s.infinite ? 1.0 : std::min(1.0, s.value + s.remainder);
    }
    case SequenceLaw::Kind::alternating: {
      double a = law_tail_sum_from(seq.law_at(0), gap + 1);
      double b = law_tail_sum_from(seq.law_at(1), gap + 1);
      return std::min(1.0, a + b);
    }
  }
  return 1.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Half-line runners.

// Direct relay process with relays at the given positions (empty = every
// vertex; otherwise strictly increasing, starting at 0). The relay with index
// n fires the law at sequence position n once the spread reaches it; the
// informed set is always the interval [0, reach], so the window count is
// min(reach + 1, horizon). Survival means the spread reached the horizon.
inline TrialOutcome run_fireworks_line(const SequenceLaw& radii,
                                       const std::vector<int64_t>& positions, int64_t horizon,
                                       const TrialRng& rng) {
  detail::require(horizon >= 1, "fireworks line: horizon must be at least 1");
  if (!positions.empty()) {
    detail::require(positions.front() == 0, "fireworks line: first relay must sit at 0");
    for (std::size_t i = 1; i < positions.size(); ++i)
      detail::require(positions[i] > positions[i - 1],
                      "fireworks line: positions must be strictly increasing");
  }
  // number of relays inside the window [0, horizon)
  int64_t n_window =
      positions.empty()
          ? horizon
          : static_cast<int64_t>(std::lower_bound(positions.begin(), positions.end(), horizon) -
                                 positions.begin());

  TrialOutcome out;
  int64_t m = 0;
  for (int64_t n = 0; n < n_window; ++n) {
    int64_t u = positions.empty() ? n : positions[static_cast<std::size_t>(n)];
    if (u > m) break;  // the spread stopped short of the next relay
    ++out.spreaders;
    int64_t r = detail::seq_sample(radii, n, rng.uniform01(static_cast<std::uint64_t>(n),
                                                           detail::kSiteRadiusSalt));
    if (u + r > m) m = u + r;
    if (m >= horizon) {
      out.spreaders += n_window - n - 1;  // every remaining window relay hears
      break;
    }
  }
  out.reach = m;
  out.informed = std::min(m + 1, horizon);
  out.status = m >= horizon ? TrialStatus::survived_to_horizon : TrialStatus::died;
  return out;
}

inline TrialOutcome run_fireworks_line(const Law& radius, const std::vector<int64_t>& positions,
                                       int64_t horizon, const TrialRng& rng) {
  return run_fireworks_line(SequenceLaw::constant(radius), positions, horizon, rng);
}

// Direct process where vertex u holds a random number of stations, each with
// an independent radius; the effective radius is their maximum.
inline TrialOutcome run_env_fireworks_line(const Law& stations, const Law& radius,
                                           int64_t horizon, const TrialRng& rng) {
  detail::require(horizon >= 1, "env fireworks line: horizon must be at least 1");
  TrialOutcome out;
  int64_t m = 0;
  for (int64_t u = 0; u < horizon; ++u) {
    if (u > m) break;
    ++out.spreaders;
    int64_t r = detail::env_effective_radius(stations, radius, rng,
                                             static_cast<std::uint64_t>(u),
                                             detail::kSiteRadiusSalt);
    if (u + r > m) m = u + r;
    if (m >= horizon) {
      out.spreaders += horizon - u - 1;
      break;
    }
  }
  out.reach = m;
  out.informed = std::min(m + 1, horizon);
  out.status = m >= horizon ? TrialStatus::survived_to_horizon : TrialStatus::died;
  return out;
}

// Reverse process: vertex u joins when its radius reaches back to the
// rightmost informed vertex. Death cannot be witnessed in finite time with
// unbounded radii, so at stalls (checked when the gap hits a power of two)
// the engine evaluates the analytic restart mass and certifies
// dead_by_residual once it drops below eps_residual. Exact zero restart mass
// (bounded radii, gap beyond support) is reported as a plain death.
inline TrialOutcome run_reverse_line(const SequenceLaw& radii, int64_t horizon,
                                     double eps_residual, const TrialRng& rng) {
  detail::require(horizon >= 1, "reverse line: horizon must be at least 1");
  detail::require(eps_residual >= 0.0 && eps_residual < 1.0,
                  "reverse line: eps_residual outside [0,1)");
  detail::ResidualMode mode = detail::residual_mode(radii);

  TrialOutcome out;
  out.residual_mass = 1.0;
  int64_t r = 0;
  bool cheap_zero = radii.kind() == SequenceLaw::Kind::bernoulli ||
                    (radii.kind() == SequenceLaw::Kind::constant &&
                     radii.constant_law().decay().is_bounded());
  for (int64_t u = 1; u <= horizon; ++u) {
    int64_t radius = detail::seq_sample(
        radii, u, rng.uniform01(static_cast<std::uint64_t>(u), detail::kSiteRadiusSalt));
    if (radius >= u - r) {
      r = u;
      ++out.spreaders;
      continue;
    }
    int64_t gap = u - r;
    bool scheduled = (gap & (gap - 1)) == 0 || cheap_zero;
    if (!scheduled || mode == detail::ResidualMode::never) continue;
    if (mode == detail::ResidualMode::opaque)
      throw std::invalid_argument(
          "reverse line: stalled with no tail descriptor to classify the restart mass");
    double mass = detail::reverse_residual(radii, u, r);
    out.residual_mass = mass;
    if (mass == 0.0) {
      out.status = TrialStatus::died;
      out.informed = out.spreaders + 1;
      out.reach = r;
      return out;
    }
    if (mass < eps_residual) {
      out.status = TrialStatus::dead_by_residual;
      out.informed = out.spreaders + 1;
      out.reach = r;
      return out;
    }
  }
  out.status = TrialStatus::survived_to_horizon;
  if (mode == detail::ResidualMode::classify)
    out.residual_mass = detail::reverse_residual(radii, horizon, r);
  out.informed = out.spreaders + 1;
  out.reach = r;
  return out;
}

inline TrialOutcome run_reverse_line(const Law& radius, int64_t horizon, double eps_residual,
                                     const TrialRng& rng) {
  return run_reverse_line(SequenceLaw::constant(radius), horizon, eps_residual, rng);
}

// ---------------------------------------------------------------------------
// Tree runners. Structure is sampled lazily: a vertex is the hash key of its
// path, Galton-Watson offspring counts are keyed draws, and only the visited
// part of the tree ever exists. max_vertices caps the visited count; hitting
// it reports the trial as truncated (excluded from estimates).

enum class TreeModel { cone, disk, reverse_cone, env_cone };

inline const char* to_string(TreeModel m) {
  switch (m) {
    case TreeModel::cone:
      return "cone";
    case TreeModel::disk:
      return "disk";
    case TreeModel::reverse_cone:
      return "reverse_cone";
    default:
      return "env_cone";
  }
}

namespace detail {

inline int64_t tree_children(const TreeSpec& spec, int64_t depth, std::uint64_t key,
                             const TrialRng& rng) {
  if (spec.kind() == TreeSpec::Kind::galton_watson)
    return spec.offspring().sample_keyed(rng, key, kChildCountSalt);
  return spec.children(depth);
}

inline int64_t tree_radius(const Law& radius, const std::optional<Law>& stations,
                           const TrialRng& rng, std::uint64_t key) {
  if (stations) return env_effective_radius(*stations, radius, rng, key, kTreeRadiusSalt);
  return radius.sample_keyed(rng, key, kTreeRadiusSalt);
}

// Downward spread: an informed vertex passes power max(own radius, inherited
// power - 1) to its children; a child is informed iff the parent's power is
// positive. Depth-first processing keeps the frontier small: dying clusters
// are finite and surviving trials exit at the first vertex on the horizon.
inline TrialOutcome run_cone(const TreeSpec& spec, const Law& radius,
                             const std::optional<Law>& stations, int64_t horizon,
                             int64_t max_vertices, const TrialRng& rng) {
  struct Entry {
    std::uint64_t key;
    int64_t depth;
    int64_t power;
  };
  TrialOutcome out;
  out.informed = 1;
  std::vector<Entry> stack;
  stack.push_back({kRootKey, 0, tree_radius(radius, stations, rng, kRootKey)});
  while (!stack.empty()) {
    Entry v = stack.back();
    stack.pop_back();
    if (v.power < 1) continue;
    int64_t k = tree_children(spec, v.depth, v.key, rng);
    for (int64_t i = 0; i < k; ++i) {
      std::uint64_t ckey = child_key(v.key, static_cast<std::uint64_t>(i));
      ++out.informed;
      if (out.informed > max_vertices) {
        out.status = TrialStatus::truncated;
        out.spreaders = out.informed;
        return out;
      }
      out.reach = std::max(out.reach, v.depth + 1);
      if (v.depth + 1 >= horizon) {
        out.status = TrialStatus::survived_to_horizon;
        out.spreaders = out.informed;
        return out;
      }
      int64_t cr = tree_radius(radius, stations, rng, ckey);
      stack.push_back({ckey, v.depth + 1, std::max(cr, v.power - 1)});
    }
  }
  out.status = TrialStatus::died;
  out.spreaders = out.informed;
  return out;
}

// All-direction spread: a fired radius covers every vertex within that graph
// distance, through infected regions and back up the tree. Label-correcting
// search over the best residual wave power per vertex; each vertex fires its
// own radius once, at infection.
inline TrialOutcome run_disk(const TreeSpec& spec, const Law& radius,
                             const std::optional<Law>& stations, int64_t horizon,
                             int64_t max_vertices, const TrialRng& rng) {
  struct Node {
    std::uint64_t key;
    int64_t parent;  // -1 at the root
    int64_t depth;
    int64_t first_child = -1;  // nodes index; -1 until materialized
    int64_t nkids = -1;        // -1 until sampled
    int64_t best = -1;         // max wave power seen; -1 = uninfected
  };
  TrialOutcome out;
  std::vector<Node> nodes;
  nodes.push_back({kRootKey, -1, 0});
  nodes[0].best = tree_radius(radius, stations, rng, kRootKey);
  out.informed = 1;

  std::vector<std::pair<int64_t, int64_t>> stack;  // node index, power at push
  if (nodes[0].best >= 1) stack.emplace_back(0, nodes[0].best);

  // infect node j with arriving wave a >= 0; returns false on horizon hit
  auto arrive = [&](int64_t j, int64_t a) {
    Node& n = nodes[static_cast<std::size_t>(j)];
    if (n.best < 0) {
      int64_t own = tree_radius(radius, stations, rng, n.key);
      n.best = std::max(a, own);
      ++out.informed;
      out.reach = std::max(out.reach, n.depth);
      if (n.depth >= horizon) return false;
      if (n.best >= 1) stack.emplace_back(j, n.best);
    } else if (a > n.best) {
      n.best = a;
      stack.emplace_back(j, a);
    }
    return true;
  };

  while (!stack.empty()) {
    auto [i, power] = stack.back();
    stack.pop_back();
    if (power < nodes[static_cast<std::size_t>(i)].best) continue;  // stale entry
    if (nodes[static_cast<std::size_t>(i)].nkids < 0) {
      Node& n = nodes[static_cast<std::size_t>(i)];
      n.nkids = n.depth >= horizon ? 0 : tree_children(spec, n.depth, n.key, rng);
      if (n.nkids > 0) {
        if (static_cast<int64_t>(nodes.size()) + n.nkids > max_vertices) {
          out.status = TrialStatus::truncated;
          out.spreaders = out.informed;
          return out;
        }
        n.first_child = static_cast<int64_t>(nodes.size());
        for (int64_t c = 0; c < n.nkids; ++c)
          nodes.push_back({child_key(n.key, static_cast<std::uint64_t>(c)), i, n.depth + 1});
      }
    }
    // re-read after possible reallocation
    int64_t parent = nodes[static_cast<std::size_t>(i)].parent;
    int64_t first = nodes[static_cast<std::size_t>(i)].first_child;
    int64_t nk = nodes[static_cast<std::size_t>(i)].nkids;
    if (parent >= 0 && !arrive(parent, power - 1)) break;
    bool hit = false;
    for (int64_t c = 0; c < nk && !hit; ++c) hit = !arrive(first + c, power - 1);
    if (hit) break;
  }
  out.spreaders = out.informed;
  if (out.status != TrialStatus::truncated)
    out.status =
        out.reach >= horizon ? TrialStatus::survived_to_horizon : TrialStatus::died;
  return out;
}

// Reverse spread: a vertex hears when its own radius covers the distance to
// the nearest informed ancestor. Depth-first with the gap as path state;
// bounded radius support allows exact pruning of branches that drifted out of
// range, and surviving trials exit at the first informed vertex on the
// horizon. With unbounded radii a dead cluster means exploring every vertex
// above the horizon, so max_vertices bounds the work.
inline TrialOutcome run_reverse_cone(const TreeSpec& spec, const Law& radius,
                                     const std::optional<Law>& stations, int64_t horizon,
                                     int64_t max_vertices, const TrialRng& rng) {
  struct Entry {
    std::uint64_t key;
    int64_t depth;
    int64_t gap;  // distance to the nearest informed ancestor-or-self
  };
  const Decay& rd = radius.decay();
  int64_t prune_gap = rd.is_bounded() ? rd.support_max : -1;

  TrialOutcome out;
  out.informed = 1;
  int64_t visited = 1;
  std::vector<Entry> stack{{kRootKey, 0, 0}};
  while (!stack.empty()) {
    Entry v = stack.back();
    stack.pop_back();
    int64_t k = tree_children(spec, v.depth, v.key, rng);
    for (int64_t i = 0; i < k; ++i) {
      std::uint64_t ckey = child_key(v.key, static_cast<std::uint64_t>(i));
      if (++visited > max_vertices) {
        out.status = TrialStatus::truncated;
        out.spreaders = out.informed - 1;
        return out;
      }
      int64_t a = v.gap + 1;
      int64_t cr = tree_radius(radius, stations, rng, ckey);
      int64_t gap = cr >= a ? 0 : a;
      if (gap == 0) {
        ++out.informed;
        out.reach = std::max(out.reach, v.depth + 1);
        if (v.depth + 1 >= horizon) {
          out.status = TrialStatus::survived_to_horizon;
          out.spreaders = out.informed - 1;
          return out;
        }
      } else if (prune_gap >= 0 && gap > prune_gap) {
        continue;  // no descendant can ever reach back
      }
      if (v.depth + 1 < horizon) stack.push_back({ckey, v.depth + 1, gap});
    }
  }
  out.status = TrialStatus::died;
  out.spreaders = out.informed - 1;
  return out;
}

}  // namespace detail

inline TrialOutcome run_tree_trial(TreeModel model, const TreeSpec& spec, const Law& radius,
                                   const std::optional<Law>& stations, int64_t horizon,
                                   int64_t max_vertices, const TrialRng& rng) {
  detail::require(horizon >= 1, "tree trial: horizon must be at least 1");
  detail::require(max_vertices >= 1, "tree trial: max_vertices must be at least 1");
  detail::require((model == TreeModel::env_cone) == stations.has_value(),
                  "tree trial: station law exactly when the model is env_cone");
  if (spec.kind() == TreeSpec::Kind::spherically_symmetric)
    detail::require(horizon <= static_cast<int64_t>(spec.levels().size()),
                    "tree trial: horizon exceeds the recorded level data");
  switch (model) {
    case TreeModel::cone:
    case TreeModel::env_cone:
      return detail::run_cone(spec, radius, stations, horizon, max_vertices, rng);
    case TreeModel::disk:
      return detail::run_disk(spec, radius, stations, horizon, max_vertices, rng);
    case TreeModel::reverse_cone:
      return detail::run_reverse_cone(spec, radius, stations, horizon, max_vertices, rng);
  }
  throw std::invalid_argument("tree trial: unknown model");
}

// ---------------------------------------------------------------------------
// Config-driven dispatch.

struct SimConfig {
  enum class Model {
    fireworks_line,
    reverse_line,
    env_fireworks_line,
    cone,
    disk,
    reverse_cone,
    env_cone
  };

  Model model = Model::fireworks_line;
  SequenceLaw radii = SequenceLaw::constant(Law::point_mass(0));
  std::optional<Law> stations;     // env models only
  std::vector<int64_t> positions;  // line models; empty = every vertex
  std::optional<TreeSpec> tree;    // tree models only
  int64_t horizon = 1;
  int64_t max_vertices = int64_t{1} << 21;
  double eps_residual = 1e-6;
};

inline const char* to_string(SimConfig::Model m) {
  switch (m) {
    case SimConfig::Model::fireworks_line:
      return "fireworks";
    case SimConfig::Model::reverse_line:
      return "reverse";
    case SimConfig::Model::env_fireworks_line:
      return "env-fireworks";
    case SimConfig::Model::cone:
      return "cone";
    case SimConfig::Model::disk:
      return "disk";
    case SimConfig::Model::reverse_cone:
      return "reverse-cone";
    default:
      return "env-cone";
  }
}

inline TrialOutcome run_trial(const SimConfig& cfg, const TrialRng& rng) {
  using Model = SimConfig::Model;
  auto tree_model = [&](TreeModel m) {
    detail::require(cfg.tree.has_value(), "sim config: tree models need a tree literal");
    detail::require(cfg.radii.is_constant(),
                    "sim config: tree models take one radius law, not a sequence");
    return run_tree_trial(m, *cfg.tree, cfg.radii.constant_law(), cfg.stations, cfg.horizon,
                          cfg.max_vertices, rng);
  };
  switch (cfg.model) {
    case Model::fireworks_line:
      return run_fireworks_line(cfg.radii, cfg.positions, cfg.horizon, rng);
    case Model::reverse_line:
      return run_reverse_line(cfg.radii, cfg.horizon, cfg.eps_residual, rng);
    case Model::env_fireworks_line:
      detail::require(cfg.stations.has_value(), "sim config: env model needs a station law");
      detail::require(cfg.radii.is_constant(), "sim config: env model takes one radius law");
      return run_env_fireworks_line(*cfg.stations, cfg.radii.constant_law(), cfg.horizon, rng);
    case Model::cone:
      return tree_model(TreeModel::cone);
    case Model::disk:
      return tree_model(TreeModel::disk);
    case Model::reverse_cone:
      return tree_model(TreeModel::reverse_cone);
    case Model::env_cone:
      detail::require(cfg.stations.has_value(), "sim config: env model needs a station law");
      return tree_model(TreeModel::env_cone);
  }
  throw std::invalid_argument("sim config: unknown model");
}

// ---------------------------------------------------------------------------
// Aggregation. Trials are grouped into fixed blocks of 1024; workers claim
// whole blocks and block results are merged in index order, so the output is
// bit-identical for any worker count.

struct Estimate {
  double mean = 0.0;      // survival frequency over counted (non-truncated) trials
  double ci_low = 0.0;    // Wilson score interval, 95%
  double ci_high = 1.0;
  int64_t trials = 0;     // requested
  std::uint64_t master_seed = 0;
  int64_t horizon = 0;

  int64_t survived = 0;
  int64_t died = 0;
  int64_t dead_by_residual = 0;
  int64_t truncated = 0;

  double mean_spreaders = 0.0;  // over counted trials
  double mean_informed = 0.0;
  // mean restart mass of residual-classified deaths: the analytic allowance
  // for survival undercounting
  double bias_bound = 0.0;
};

namespace detail {

inline constexpr int64_t kTrialBlock = 1024;

struct TallyBlock {
  int64_t survived = 0, died = 0, residual = 0, truncated = 0;
  double spreaders = 0.0, informed = 0.0, mass = 0.0;  // per-block exact enough
};

}  // namespace detail

// Runs `trial(TrialRng(master_seed, i))` for i in [0, trials) and aggregates.
// The trial functor must be pure: it is invoked concurrently from `workers`
// threads. An exception in any trial aborts the run and rethrows.
template <typename TrialFn>
Estimate estimate_fn(TrialFn&& trial, int64_t trials, std::uint64_t master_seed, int workers,
                     int64_t horizon) {
  detail::require(trials >= 1, "estimate: trials must be at least 1");
  workers = std::clamp(workers, 1, 256);

  int64_t n_blocks = (trials + detail::kTrialBlock - 1) / detail::kTrialBlock;
  std::vector<detail::TallyBlock> blocks(static_cast<std::size_t>(n_blocks));

  std::atomic<int64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;

  auto run_block = [&](int64_t b) {
    detail::TallyBlock& blk = blocks[static_cast<std::size_t>(b)];
    NeumaierSum spread, informed, mass;
    int64_t lo = b * detail::kTrialBlock;
    int64_t hi = std::min(trials, lo + detail::kTrialBlock);
    for (int64_t t = lo; t < hi; ++t) {
      TrialOutcome o = trial(TrialRng(master_seed, static_cast<std::uint64_t>(t)));
      switch (o.status) {
        case TrialStatus::survived_to_horizon:
          ++blk.survived;
          break;
        case TrialStatus::died:
          ++blk.died;
          break;
        case TrialStatus::dead_by_residual:
          ++blk.residual;
          mass.add(o.residual_mass);
          break;
        case TrialStatus::truncated:
          ++blk.truncated;
          continue;  // excluded from the count-based statistics
      }
      spread.add(static_cast<double>(o.spreaders));
      informed.add(static_cast<double>(o.informed));
    }
    blk.spreaders = spread.value();
    blk.informed = informed.value();
    blk.mass = mass.value();
  };

  auto work = [&] {
    for (;;) {
      int64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        run_block(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);

  Estimate est;
  est.trials = trials;
  est.master_seed = master_seed;
  est.horizon = horizon;
  NeumaierSum spread, informed, mass;
  for (const detail::TallyBlock& blk : blocks) {  // fixed merge order
    est.survived += blk.survived;
    est.died += blk.died;
    est.dead_by_residual += blk.residual;
    est.truncated += blk.truncated;
    spread.add(blk.spreaders);
    informed.add(blk.informed);
    mass.add(blk.mass);
  }
  int64_t counted = trials - est.truncated;
  if (counted > 0) {
    est.mean = static_cast<double>(est.survived) / static_cast<double>(counted);
    est.mean_spreaders = spread.value() / static_cast<double>(counted);
    est.mean_informed = informed.value() / static_cast<double>(counted);
    est.bias_bound = mass.value() / static_cast<double>(counted);
  }
  auto ci = wilson_interval(est.survived, counted);
  double lo = ci.low, hi = ci.high;
  est.ci_low = lo;
  est.ci_high = hi;
  return est;
}

inline Estimate estimate(const SimConfig& cfg, int64_t trials, std::uint64_t master_seed,
                         int workers) {
  return estimate_fn([&cfg](const TrialRng& rng) { return run_trial(cfg, rng); }, trials,
                     master_seed, workers, cfg.horizon);
}

}  // namespace rumor

#endif  // RUMOR_SIM_HPP
