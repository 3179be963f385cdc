// Monte Carlo engine: line and tree trial runners, residual-mass death
// classification, and the block-deterministic estimate aggregator. Expected
// values come from closed forms, an independent lead-state DP, or full
// materialized-tree references recomputed here; never from the runners.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "rumor/line.hpp"
#include "rumor/sim.hpp"

using rumor::child_key;
using rumor::Estimate;
using rumor::estimate;
using rumor::estimate_fn;
using rumor::kRootKey;
using rumor::Law;
using rumor::run_fireworks_line;
using rumor::run_reverse_line;
using rumor::run_tree_trial;
using rumor::SequenceLaw;
using rumor::SimConfig;
using rumor::TreeModel;
using rumor::TreeSpec;
using rumor::TrialOutcome;
using rumor::TrialRng;
using rumor::TrialStatus;
using rumor::two_proportion_z;

namespace {

constexpr std::int64_t kNoRelays = -1;  // marker: run with every vertex occupied

// Survival-to-horizon probability for the homogeneous direct process,
// O(h * support) per station: DP over the lead s = reach - position.
double lead_dp_slow(const Law& R, std::int64_t h) {
  std::vector<double> p(static_cast<std::size_t>(h), 0.0), q(p);
  for (std::int64_t s = 0; s < h; ++s) p[static_cast<std::size_t>(s)] = R.pmf(s);
  double survived = R.tail(h);
  for (std::int64_t u = 1; u < h; ++u) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::int64_t s = 1; s < h; ++s) {
      double w = p[static_cast<std::size_t>(s)];
      if (w == 0.0) continue;
      std::int64_t lead = s - 1;
      std::int64_t cap = h - u;
      for (std::int64_t r = 0;; ++r) {
        std::int64_t nl = std::max(lead, r);
        if (nl >= cap) {
          survived += w * R.tail(r);
          break;
        }
        q[static_cast<std::size_t>(nl)] += w * R.pmf(r);
      }
    }
    std::swap(p, q);
  }
  return survived;
}

// Same DP with prefix sums, O(h) per station: the jump transition lands every
// lower lead on the same radius atom, so one running prefix replaces the scan.
double lead_dp(const Law& R, std::int64_t h) {
  std::vector<double> p(static_cast<std::size_t>(h), 0.0), q(p);
  for (std::int64_t s = 0; s < h; ++s) p[static_cast<std::size_t>(s)] = R.pmf(s);
  double survived = R.tail(h);
  for (std::int64_t u = 1; u < h; ++u) {
    std::int64_t cap = h - u;
    double live = 0.0;
    for (std::int64_t s = 1; s < h; ++s) live += p[static_cast<std::size_t>(s)];
    survived += live * R.tail(cap);
    std::fill(q.begin(), q.end(), 0.0);
    double prefix = 0.0;  // sum of p[1..nl]
    for (std::int64_t nl = 0; nl < cap; ++nl) {
      prefix += nl >= 1 ? p[static_cast<std::size_t>(nl)] : 0.0;
      double stay = nl + 1 < h ? p[static_cast<std::size_t>(nl + 1)] * (1.0 - R.tail(nl + 1)) : 0.0;
      q[static_cast<std::size_t>(nl)] = stay + R.pmf(nl) * prefix;
    }
    std::swap(p, q);
  }
  return survived;
}

// Reference for the direct line runner: the plain reach recursion, with the
// same per-index keyed uniforms, counting every window relay once the spread
// passes the horizon.
TrialOutcome line_reference(const Law& law, std::int64_t relay_gap, std::int64_t horizon,
                            const TrialRng& rng) {
  TrialOutcome out;
  std::int64_t m = 0;
  std::int64_t n_window = relay_gap == kNoRelays
                              ? horizon
                              : (horizon + relay_gap - 1) / relay_gap;  // relays at n * gap
  for (std::int64_t n = 0; n < n_window; ++n) {
    std::int64_t u = relay_gap == kNoRelays ? n : n * relay_gap;
    if (u > m) break;
    ++out.spreaders;
    std::int64_t r = law.quantile(
        rng.uniform01(static_cast<std::uint64_t>(n), rumor::detail::kSiteRadiusSalt));
    m = std::max(m, u + r);
    if (m >= horizon) {
      out.spreaders += n_window - n - 1;
      break;
    }
  }
  out.reach = m;
  out.informed = std::min(m + 1, horizon);
  out.status = m >= horizon ? TrialStatus::survived_to_horizon : TrialStatus::died;
  return out;
}

// Materialized tree with the runner's key scheme: every vertex of depth at
// most max_depth, its sampled radius, and its sampled child count.
struct RefTree {
  std::vector<std::uint64_t> key;
  std::vector<std::int64_t> parent, depth, radius;
  std::vector<std::vector<std::int64_t>> kids;
};

RefTree materialize(const TreeSpec& spec, const Law& law, std::int64_t max_depth,
                    const TrialRng& rng) {
  RefTree t;
  t.key.push_back(kRootKey);
  t.parent.push_back(-1);
  t.depth.push_back(0);
  for (std::size_t i = 0; i < t.key.size(); ++i) {
    t.radius.push_back(law.sample_keyed(rng, t.key[i], rumor::detail::kTreeRadiusSalt));
    t.kids.emplace_back();
    if (t.depth[i] >= max_depth) continue;
    std::int64_t k = spec.kind() == TreeSpec::Kind::galton_watson
                         ? spec.offspring().sample_keyed(rng, t.key[i],
                                                         rumor::detail::kChildCountSalt)
                         : spec.children(t.depth[i]);
    for (std::int64_t c = 0; c < k; ++c) {
      t.kids[i].push_back(static_cast<std::int64_t>(t.key.size()));
      t.key.push_back(child_key(t.key[i], static_cast<std::uint64_t>(c)));
      t.parent.push_back(static_cast<std::int64_t>(i));
      t.depth.push_back(t.depth[i] + 1);
    }
  }
  return t;
}

// Downward power recursion on the materialized tree; no early exit, so the
// informed count is the exact cluster size, to compare on died trials.
std::pair<std::int64_t, bool> cone_reference(const RefTree& t, std::int64_t horizon) {
  std::vector<std::int64_t> power(t.key.size(), -1);
  power[0] = t.radius[0];
  std::int64_t informed = 1;
  bool at_horizon = horizon == 0;
  for (std::size_t i = 0; i < t.key.size(); ++i) {
    if (power[i] < 0) continue;
    for (std::int64_t c : t.kids[i]) {
      if (power[i] < 1) continue;
      auto ci = static_cast<std::size_t>(c);
      power[ci] = std::max(t.radius[ci], power[i] - 1);
      ++informed;
      if (t.depth[ci] >= horizon) at_horizon = true;
    }
  }
  return {informed, at_horizon};
}

// All-direction wave fixpoint: arriving power a infects (best = max(a, own))
// or relaxes (best = max(best, a)); iterate to stability.
std::pair<std::int64_t, bool> disk_reference(const RefTree& t, std::int64_t horizon) {
  std::vector<std::int64_t> best(t.key.size(), -1);
  best[0] = t.radius[0];
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < t.key.size(); ++i) {
      if (best[i] < 1) continue;
      if (t.depth[i] >= horizon) continue;  // the runner never fires these
      auto touch = [&](std::int64_t j) {
        auto ji = static_cast<std::size_t>(j);
        std::int64_t a = best[i] - 1;
        if (best[ji] < 0) {
          best[ji] = std::max(a, t.radius[ji]);
          changed = true;
        } else if (a > best[ji]) {
          best[ji] = a;
          changed = true;
        }
      };
      if (t.parent[i] >= 0) touch(t.parent[i]);
      for (std::int64_t c : t.kids[i]) touch(c);
    }
  }
  std::int64_t informed = 0;
  bool at_horizon = false;
  for (std::size_t i = 0; i < t.key.size(); ++i) {
    if (best[i] < 0) continue;
    ++informed;
    if (t.depth[i] >= horizon) at_horizon = true;
  }
  return {informed, at_horizon};
}

// Top-down hearing recursion: a vertex hears when its radius covers the
// distance to the nearest informed ancestor-or-self.
std::pair<std::int64_t, bool> reverse_cone_reference(const RefTree& t, std::int64_t horizon) {
  std::vector<std::int64_t> gap(t.key.size(), 0);
  std::int64_t informed = 1;
  bool at_horizon = horizon == 0;
  for (std::size_t i = 1; i < t.key.size(); ++i) {
    std::int64_t a = gap[static_cast<std::size_t>(t.parent[i])] + 1;
    if (t.radius[i] >= a) {
      gap[i] = 0;
      ++informed;
      if (t.depth[i] >= horizon) at_horizon = true;
    } else {
      gap[i] = a;
    }
  }
  return {informed, at_horizon};
}

double euler_spreader_success() {
  double p = 1.0;
  for (int k = 0; k < 80; ++k) p *= 1.0 - std::pow(0.5, k + 1);
  return p;  // remainder below 1e-20: factors differ from 1 by 2^-(k+1)
}

}  // namespace

TEST_CASE("direct line runs and their window counts", "[sim]") {
  std::vector<std::int64_t> every;

  SECTION("degenerate radii pin the exact outcome") {
    auto a = run_fireworks_line(Law::point_mass(1), every, 50, TrialRng(1, 0));
    CHECK(a.status == TrialStatus::survived_to_horizon);
    CHECK(a.informed == 50);
    CHECK(a.spreaders == 50);
    CHECK(a.reach == 50);

    auto b = run_fireworks_line(Law::point_mass(0), every, 50, TrialRng(1, 0));
    CHECK(b.status == TrialStatus::died);
    CHECK(b.informed == 1);
    CHECK(b.spreaders == 1);
    CHECK(b.reach == 0);
  }

  SECTION("runner agrees with the reach recursion replayed outside") {
    for (std::uint64_t t = 0; t < 400; ++t) {
      TrialRng rng(321, t);
      auto got = run_fireworks_line(Law::binomial(2, 0.5), every, 40, rng);
      auto want = line_reference(Law::binomial(2, 0.5), kNoRelays, 40, rng);
      REQUIRE(got.status == want.status);
      REQUIRE(got.spreaders == want.spreaders);
      REQUIRE(got.informed == want.informed);
      REQUIRE(got.reach == want.reach);
    }
  }

  SECTION("bernoulli chain survival is the product of the step chances") {
    SimConfig cfg;
    cfg.radii = SequenceLaw::constant(Law::bernoulli(0.9));
    cfg.horizon = 6;
    auto est = estimate(cfg, 20000, 77, 2);
    double exact = std::pow(0.9, 6.0);
    CHECK(std::abs(est.mean - exact) < 3.0 * std::sqrt(exact * (1 - exact) / 20000.0));
    CHECK(est.ci_low <= exact);
    CHECK(est.ci_high >= exact);
  }

  SECTION("lead DP oracle: prefix-sum form matches the scan form") {
    for (const Law& R : {Law::binomial(2, 0.5), Law::geometric(0.6), Law::bernoulli(0.8)}) {
      for (std::int64_t h : {2, 5, 17, 30}) {
        double slow = lead_dp_slow(R, h);
        double fast = lead_dp(R, h);
        REQUIRE(fast == Catch::Approx(slow).epsilon(0.0).margin(1e-12));
      }
    }
  }

  SECTION("monte carlo matches the DP at a nontrivial horizon") {
    double exact = lead_dp(Law::binomial(2, 0.5), 30);
    SimConfig cfg;
    cfg.radii = SequenceLaw::constant(Law::binomial(2, 0.5));
    cfg.horizon = 30;
    auto est = estimate(cfg, 40000, 5, 2);
    CHECK(exact == Catch::Approx(0.00293).epsilon(0.0).margin(5e-5));
    CHECK(std::abs(est.mean - exact) < 3.0 * std::sqrt(exact * (1 - exact) / 40000.0));
  }

  SECTION("relay placement: bounded gaps with a matching radius never die") {
    std::vector<std::int64_t> relays;
    for (std::int64_t u = 0; u < 100; u += 2) relays.push_back(u);
    auto out = run_fireworks_line(Law::point_mass(2), relays, 100, TrialRng(4, 9));
    CHECK(out.status == TrialStatus::survived_to_horizon);
    CHECK(out.spreaders == 50);
    CHECK(out.informed == 100);
  }

  SECTION("relay placement: a hole wider than the radius support kills the run") {
    std::vector<std::int64_t> relays{0, 1, 2, 3, 10};
    auto out = run_fireworks_line(Law::point_mass(2), relays, 20, TrialRng(4, 10));
    CHECK(out.status == TrialStatus::died);
    CHECK(out.spreaders == 4);
    CHECK(out.reach == 5);
    CHECK(out.informed == 6);
  }

  SECTION("relay placement validation") {
    std::vector<std::int64_t> not_at_zero{1, 2};
    std::vector<std::int64_t> decreasing{0, 5, 3};
    CHECK_THROWS_AS(run_fireworks_line(Law::point_mass(1), not_at_zero, 10, TrialRng(0, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_fireworks_line(Law::point_mass(1), decreasing, 10, TrialRng(0, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_fireworks_line(Law::point_mass(1), every, 0, TrialRng(0, 0)),
                    std::invalid_argument);
  }

  SECTION("position-dependent radii follow the indexed laws") {
    // success chance of step n is 1 - b_n; survival to h is the product
    SequenceLaw seq = SequenceLaw::bernoulli(rumor::BSeq::geometric(0.3, 0.5));
    double exact = 1.0;
    for (int n = 0; n < 30; ++n) exact *= 1.0 - 0.3 * std::pow(0.5, n);
    SimConfig cfg;
    cfg.radii = seq;
    cfg.horizon = 30;
    auto est = estimate(cfg, 20000, 8, 2);
    CHECK(std::abs(est.mean - exact) < 3.0 * std::sqrt(exact * (1 - exact) / 20000.0));
  }

  SECTION("deeper horizons only remove survivors, never add them") {
    SimConfig cfg;
    cfg.radii = SequenceLaw::constant(Law::geometric(0.6));
    cfg.horizon = 10;
    auto shallow = estimate(cfg, 20000, 99, 2);
    cfg.horizon = 20;
    auto deep = estimate(cfg, 20000, 99, 2);
    CHECK(shallow.survived >= deep.survived);
    // same keyed draws: every deep survivor is a shallow survivor trial by trial
    for (std::uint64_t t = 0; t < 500; ++t) {
      TrialRng rng(99, t);
      auto d = run_fireworks_line(Law::geometric(0.6), every, 20, rng);
      if (d.status == TrialStatus::survived_to_horizon) {
        auto s = run_fireworks_line(Law::geometric(0.6), every, 10, rng);
        REQUIRE(s.status == TrialStatus::survived_to_horizon);
      }
    }
  }
}

TEST_CASE("reverse line: spreader law and residual classification", "[sim]") {
  SECTION("zero radii die at the first stall with zero restart mass") {
    auto out = run_reverse_line(Law::point_mass(0), 100, 1e-6, TrialRng(2, 0));
    CHECK(out.status == TrialStatus::died);
    CHECK(out.spreaders == 0);
    CHECK(out.informed == 1);
    CHECK(out.residual_mass == 0.0);
  }

  SECTION("radius 3 exactly keeps every vertex within hearing range") {
    auto out = run_reverse_line(Law::point_mass(3), 200, 1e-6, TrialRng(2, 1));
    CHECK(out.status == TrialStatus::survived_to_horizon);
    CHECK(out.spreaders == 200);
    CHECK(out.reach == 200);
  }

  SECTION("final spreader count is geometric with the stall-product success") {
    double p = euler_spreader_success();
    CHECK(p == Catch::Approx(0.2887880951).epsilon(0.0).margin(1e-9));
    std::map<std::int64_t, std::int64_t> hist;
    const std::int64_t n = 100000;
    for (std::int64_t t = 0; t < n; ++t) {
      auto out = run_reverse_line(Law::geometric(0.5), std::int64_t{1} << 20, 1e-6,
                                  TrialRng(11, static_cast<std::uint64_t>(t)));
      REQUIRE(out.status != TrialStatus::survived_to_horizon);
      ++hist[std::min<std::int64_t>(out.spreaders, 8)];
    }
    double chi2 = 0.0;
    for (auto [k, c] : hist) {
      double expected =
          (k < 8 ? p * std::pow(1 - p, static_cast<double>(k)) : std::pow(1 - p, 8.0)) *
          static_cast<double>(n);
      chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) /
              expected;
    }
    CHECK(chi2 < 20.09);  // df 8 at the 1% level
  }

  SECTION("classification threshold only defers the verdict, never changes it") {
    for (std::uint64_t t = 0; t < 2000; ++t) {
      auto coarse = run_reverse_line(Law::geometric(0.5), std::int64_t{1} << 20, 1e-4,
                                     TrialRng(12, t));
      auto fine = run_reverse_line(Law::geometric(0.5), std::int64_t{1} << 20, 1e-8,
                                   TrialRng(12, t));
      REQUIRE(coarse.spreaders == fine.spreaders);
      REQUIRE(coarse.status == fine.status);
      if (coarse.status == TrialStatus::dead_by_residual) {
        REQUIRE(coarse.residual_mass < 1e-4);
        REQUIRE(fine.residual_mass < 1e-8);
      }
    }
  }

  SECTION("non-summable hearing tails are never classified dead") {
    for (std::uint64_t t = 0; t < 200; ++t) {
      auto out = run_reverse_line(Law::power_law_example(), 4000, 1e-6, TrialRng(3, t));
      REQUIRE(out.status == TrialStatus::survived_to_horizon);
      REQUIRE(out.residual_mass == 1.0);
    }
    // renewal density over one long window: spreader fraction near 1/2
    auto out = run_reverse_line(Law::power_law_example(), 100000, 1e-6, TrialRng(44, 7));
    CHECK(std::abs(static_cast<double>(out.spreaders) / 1e5 - 0.5) < 0.03);
  }

  SECTION("bounded radii report hard death, not residual death") {
    std::int64_t total = 0;
    const std::int64_t n = 20000;
    for (std::int64_t t = 0; t < n; ++t) {
      auto out = run_reverse_line(Law::bernoulli(0.5), 1 << 16, 1e-6,
                                  TrialRng(13, static_cast<std::uint64_t>(t)));
      REQUIRE(out.status == TrialStatus::died);
      REQUIRE(out.residual_mass == 0.0);
      total += out.spreaders;
    }
    // run length of successes at chance 1/2: mean 1
    CHECK(std::abs(static_cast<double>(total) / static_cast<double>(n) - 1.0) <
          3.0 * std::sqrt(2.0 / static_cast<double>(n)));
  }

  SECTION("spike sequences: expected spreaders is the spike mass in the window") {
    SequenceLaw seq = SequenceLaw::spike(rumor::BSeq::geometric(0.5, 0.5));
    double mean = 0.0, var = 0.0;
    for (int u = 1; u < 60; ++u) {
      double b = 0.5 * std::pow(0.5, u);
      mean += b;
      var += b * (1 - b);
    }
    const std::int64_t n = 20000;
    std::int64_t total = 0;
    for (std::int64_t t = 0; t < n; ++t) {
      auto out = rumor::run_reverse_line(seq, 1 << 14, 1e-9,
                                         TrialRng(14, static_cast<std::uint64_t>(t)));
      REQUIRE(out.status != TrialStatus::truncated);
      total += out.spreaders;
    }
    CHECK(std::abs(static_cast<double>(total) / static_cast<double>(n) - mean) <
          3.0 * std::sqrt(var / static_cast<double>(n)));
  }

  SECTION("stalling with no tail descriptor is an error, not a guess") {
    Law opaque = Law::from_tail_function(
        [](std::int64_t k) { return k <= 0 ? 1.0 : 1e-9 / static_cast<double>(k * k); },
        rumor::Decay{}, "opaque-test");
    CHECK_THROWS_AS(run_reverse_line(opaque, 1000, 1e-6, TrialRng(15, 0)),
                    std::invalid_argument);
  }

  SECTION("pointwise larger radii never lose spreaders on shared randomness") {
    for (std::uint64_t t = 0; t < 500; ++t) {
      auto lo = run_reverse_line(Law::geometric(0.35), 4096, 1e-9, TrialRng(16, t));
      auto hi = run_reverse_line(Law::geometric(0.55), 4096, 1e-9, TrialRng(16, t));
      REQUIRE(hi.spreaders >= lo.spreaders);
      if (lo.status == TrialStatus::survived_to_horizon)
        REQUIRE(hi.status == TrialStatus::survived_to_horizon);
    }
  }
}

TEST_CASE("cone spread on trees", "[sim]") {
  SECTION("unit radii walk one branch to the horizon") {
    auto out = run_tree_trial(TreeModel::cone, TreeSpec::homogeneous(2), Law::point_mass(1),
                              std::nullopt, 5, 1 << 20, TrialRng(6, 0));
    CHECK(out.status == TrialStatus::survived_to_horizon);
    CHECK(out.informed == 11);  // root + first level + one expansion per depth + exit
    CHECK(out.spreaders == 11);
    CHECK(out.reach == 5);

    auto dead = run_tree_trial(TreeModel::cone, TreeSpec::homogeneous(2), Law::point_mass(0),
                               std::nullopt, 5, 1 << 20, TrialRng(6, 1));
    CHECK(dead.status == TrialStatus::died);
    CHECK(dead.informed == 1);
  }

  SECTION("periodic and decorated-root degrees feed the expansion count") {
    auto per = run_tree_trial(TreeModel::cone, TreeSpec::periodic({2, 3}), Law::point_mass(1),
                              std::nullopt, 4, 1 << 20, TrialRng(6, 2));
    CHECK(per.status == TrialStatus::survived_to_horizon);
    CHECK(per.informed == 10);  // 1 + (3 + 3 + 2) + 1

    auto plus = run_tree_trial(TreeModel::cone, TreeSpec::rooted_plus(3), Law::point_mass(1),
                               std::nullopt, 3, 1 << 20, TrialRng(6, 3));
    CHECK(plus.status == TrialStatus::survived_to_horizon);
    CHECK(plus.informed == 8);  // 1 + (3 + 3) + 1
  }

  SECTION("recorded level profiles cap the horizon") {
    TreeSpec sph = TreeSpec::spherically_symmetric({3, 1, 2});
    auto out = run_tree_trial(TreeModel::cone, sph, Law::point_mass(1), std::nullopt, 3,
                              1 << 20, TrialRng(6, 4));
    CHECK(out.status == TrialStatus::survived_to_horizon);
    CHECK(out.informed == 7);  // 1 + (3 + 1) + 1 + exit at depth 3
    CHECK_THROWS_AS(run_tree_trial(TreeModel::cone, sph, Law::point_mass(1), std::nullopt, 4,
                                   1 << 20, TrialRng(6, 5)),
                    std::invalid_argument);
  }

  SECTION("offspring-driven survival matches the extinction fixed point") {
    // unit radii on Binomial(3, 1/2) offspring: survival of the branching
    // process itself; extinction solves q = (1+q)^3 / 8, q = sqrt(5) - 2
    std::int64_t surv = 0;
    const std::int64_t n = 20000;
    for (std::int64_t t = 0; t < n; ++t)
      surv += run_tree_trial(TreeModel::cone, TreeSpec::galton_watson(Law::binomial(3, 0.5)),
                             Law::point_mass(1), std::nullopt, 40, 1 << 20,
                             TrialRng(7, static_cast<std::uint64_t>(t)))
                  .status == TrialStatus::survived_to_horizon;
    double exact = 3.0 - std::sqrt(5.0);
    CHECK(std::abs(static_cast<double>(surv) / static_cast<double>(n) - exact) <
          3.0 * std::sqrt(exact * (1 - exact) / static_cast<double>(n)));
  }

  SECTION("survival estimate sits inside the analytic bracket at depth 60") {
    SimConfig cfg;
    cfg.model = SimConfig::Model::cone;
    cfg.tree = TreeSpec::homogeneous(2);
    cfg.radii = SequenceLaw::constant(Law::binomial(4, 0.5));
    cfg.horizon = 60;
    auto deep = estimate(cfg, 50000, 13, 2);
    CHECK(deep.truncated == 0);
    CHECK(std::abs(deep.mean - 0.93743594) < 3.0 * std::sqrt(0.9374 * 0.0626 / 50000.0));
    cfg.horizon = 30;
    auto shallow = estimate(cfg, 50000, 13, 2);
    CHECK(shallow.survived >= deep.survived);
    CHECK(shallow.mean - deep.mean < 1e-3);  // depth bias is already tiny at 30
  }

  SECTION("runner matches the materialized-tree recursion") {
    for (std::uint64_t t = 0; t < 250; ++t) {
      TrialRng rng(17, t);
      auto got = run_tree_trial(TreeModel::cone, TreeSpec::homogeneous(2), Law::geometric(0.4),
                                std::nullopt, 8, 1 << 20, rng);
      RefTree tree = materialize(TreeSpec::homogeneous(2), Law::geometric(0.4), 8, rng);
      auto [informed, at_horizon] = cone_reference(tree, 8);
      REQUIRE((got.status == TrialStatus::survived_to_horizon) == at_horizon);
      if (!at_horizon) REQUIRE(got.informed == informed);
    }
    // same check through sampled offspring counts
    TreeSpec gw = TreeSpec::galton_watson(Law::binomial(2, 0.6));
    for (std::uint64_t t = 0; t < 250; ++t) {
      TrialRng rng(18, t);
      auto got = run_tree_trial(TreeModel::cone, gw, Law::geometric(0.5), std::nullopt, 8,
                                1 << 20, rng);
      RefTree tree = materialize(gw, Law::geometric(0.5), 8, rng);
      auto [informed, at_horizon] = cone_reference(tree, 8);
      REQUIRE((got.status == TrialStatus::survived_to_horizon) == at_horizon);
      if (!at_horizon) REQUIRE(got.informed == informed);
    }
  }

  SECTION("vertex budget reports truncation") {
    auto out = run_tree_trial(TreeModel::cone, TreeSpec::homogeneous(2), Law::point_mass(1),
                              std::nullopt, 50, 5, TrialRng(6, 6));
    CHECK(out.status == TrialStatus::truncated);
  }
}

TEST_CASE("disk spread on trees", "[sim]") {
  SECTION("unit radii: survival factors through open-vertex branching") {
    // radius 1 with chance 0.7: the root needs its own hit, then each child
    // line survives through open vertices; q = 0.3 + 0.7 q^2 gives q = 3/7
    std::int64_t surv = 0;
    const std::int64_t n = 40000;
    for (std::int64_t t = 0; t < n; ++t)
      surv += run_tree_trial(TreeModel::disk, TreeSpec::homogeneous(2), Law::bernoulli(0.7),
                             std::nullopt, 40, 1 << 20,
                             TrialRng(8, static_cast<std::uint64_t>(t)))
                  .status == TrialStatus::survived_to_horizon;
    double q = 3.0 / 7.0;
    double exact = 0.7 * (1.0 - q * q * q);
    CHECK(std::abs(static_cast<double>(surv) / static_cast<double>(n) - exact) <
          3.0 * std::sqrt(exact * (1 - exact) / static_cast<double>(n)));
  }

  SECTION("runner matches the wave fixpoint on the materialized tree") {
    for (std::uint64_t t = 0; t < 250; ++t) {
      TrialRng rng(19, t);
      auto got = run_tree_trial(TreeModel::disk, TreeSpec::homogeneous(2),
                                Law::binomial(2, 0.4), std::nullopt, 6, 1 << 20, rng);
      RefTree tree = materialize(TreeSpec::homogeneous(2), Law::binomial(2, 0.4), 6, rng);
      auto [informed, at_horizon] = disk_reference(tree, 6);
      REQUIRE((got.status == TrialStatus::survived_to_horizon) == at_horizon);
      if (!at_horizon) REQUIRE(got.informed == informed);
    }
  }

  SECTION("the up-and-down wave informs at least the downward cone") {
    for (std::uint64_t t = 0; t < 250; ++t) {
      TrialRng rng(20, t);
      auto cone = run_tree_trial(TreeModel::cone, TreeSpec::homogeneous(2), Law::geometric(0.45),
                                 std::nullopt, 9, 1 << 20, rng);
      auto disk = run_tree_trial(TreeModel::disk, TreeSpec::homogeneous(2), Law::geometric(0.45),
                                 std::nullopt, 9, 1 << 20, rng);
      if (cone.status == TrialStatus::survived_to_horizon)
        REQUIRE(disk.status == TrialStatus::survived_to_horizon);
      if (cone.status == TrialStatus::died && disk.status == TrialStatus::died)
        REQUIRE(disk.informed >= cone.informed);
    }
  }

  SECTION("geometric radii bracket the phase transition at depth 50") {
    SimConfig cfg;
    cfg.model = SimConfig::Model::disk;
    cfg.tree = TreeSpec::homogeneous(2);
    cfg.radii = SequenceLaw::constant(Law::geometric(0.35));
    cfg.horizon = 50;
    auto hot = estimate(cfg, 20000, 9, 2);
    CHECK(hot.truncated == 0);
    CHECK(hot.ci_low > 0.12);
    cfg.radii = SequenceLaw::constant(Law::geometric(0.05));
    auto cold = estimate(cfg, 20000, 9, 2);
    CHECK(cold.mean < 1e-3);
    CHECK(cold.ci_high < 0.01);
  }
}

TEST_CASE("reverse spread on trees", "[sim]") {
  SECTION("unit radii hear everywhere and exit on one branch") {
    auto out = run_tree_trial(TreeModel::reverse_cone, TreeSpec::homogeneous(2),
                              Law::point_mass(1), std::nullopt, 5, 1 << 20, TrialRng(10, 0));
    CHECK(out.status == TrialStatus::survived_to_horizon);
    CHECK(out.informed == 11);
    CHECK(out.spreaders == 10);  // the origin is not a spreader here
    CHECK(out.reach == 5);
  }

  SECTION("radius-1 hearing matches the open-vertex fixed point") {
    // a vertex hears iff its own radius is 1, so hearing spreads as Binomial(2, 0.7)
    // branching below the root: root survival 1 - (9/49 extinction root)^3... the
    // three root lines die with chance q solving q = (0.3 + 0.7 q)^2, q = 9/49
    std::int64_t surv = 0;
    const std::int64_t n = 40000;
    for (std::int64_t t = 0; t < n; ++t)
      surv += run_tree_trial(TreeModel::reverse_cone, TreeSpec::homogeneous(2),
                             Law::bernoulli(0.7), std::nullopt, 25, 1 << 20,
                             TrialRng(10, static_cast<std::uint64_t>(t)))
                  .status == TrialStatus::survived_to_horizon;
    double exact = 316.0 / 343.0;  // 1 - (3/7)^3
    CHECK(std::abs(static_cast<double>(surv) / static_cast<double>(n) - exact) <
          3.5 * std::sqrt(exact * (1 - exact) / static_cast<double>(n)));
  }

  SECTION("runner matches the hearing recursion, including range pruning") {
    for (std::uint64_t t = 0; t < 200; ++t) {
      TrialRng rng(21, t);
      auto got = run_tree_trial(TreeModel::reverse_cone, TreeSpec::homogeneous(2),
                                Law::bernoulli(0.6), std::nullopt, 9, 1 << 20, rng);
      RefTree tree = materialize(TreeSpec::homogeneous(2), Law::bernoulli(0.6), 9, rng);
      auto [informed, at_horizon] = reverse_cone_reference(tree, 9);
      REQUIRE((got.status == TrialStatus::survived_to_horizon) == at_horizon);
      if (!at_horizon) REQUIRE(got.informed == informed);
    }
    for (std::uint64_t t = 0; t < 60; ++t) {
      TrialRng rng(22, t);
      auto got = run_tree_trial(TreeModel::reverse_cone, TreeSpec::homogeneous(2),
                                Law::geometric(0.5), std::nullopt, 9, 1 << 20, rng);
      RefTree tree = materialize(TreeSpec::homogeneous(2), Law::geometric(0.5), 9, rng);
      auto [informed, at_horizon] = reverse_cone_reference(tree, 9);
      REQUIRE((got.status == TrialStatus::survived_to_horizon) == at_horizon);
      if (!at_horizon) REQUIRE(got.informed == informed);
    }
  }

  SECTION("vertex budget reports truncation on wide unbounded searches") {
    auto out = run_tree_trial(TreeModel::reverse_cone, TreeSpec::homogeneous(2),
                              Law::geometric(0.2), std::nullopt, 30, 2000, TrialRng(23, 0));
    CHECK(out.status == TrialStatus::truncated);
  }
}

TEST_CASE("environment trials and the annealed counterpart", "[sim]") {
  SECTION("one station per vertex is the plain process, draw for draw") {
    SimConfig env;
    env.model = SimConfig::Model::env_fireworks_line;
    env.stations = Law::point_mass(1);
    env.radii = SequenceLaw::constant(Law::geometric(0.55));
    env.horizon = 200;
    SimConfig plain = env;
    plain.model = SimConfig::Model::fireworks_line;
    plain.stations.reset();
    for (std::uint64_t t = 0; t < 2000; ++t) {
      auto a = rumor::run_trial(env, TrialRng(24, t));
      auto b = rumor::run_trial(plain, TrialRng(24, t));
      REQUIRE(a.status == b.status);
      REQUIRE(a.spreaders == b.spreaders);
      REQUIRE(a.reach == b.reach);
    }

    SimConfig tenv;
    tenv.model = SimConfig::Model::env_cone;
    tenv.stations = Law::point_mass(1);
    tenv.radii = SequenceLaw::constant(Law::geometric(0.5));
    tenv.tree = TreeSpec::homogeneous(2);
    tenv.horizon = 12;
    SimConfig tplain = tenv;
    tplain.model = SimConfig::Model::cone;
    tplain.stations.reset();
    for (std::uint64_t t = 0; t < 1000; ++t) {
      auto a = rumor::run_trial(tenv, TrialRng(25, t));
      auto b = rumor::run_trial(tplain, TrialRng(25, t));
      REQUIRE(a.status == b.status);
      REQUIRE(a.informed == b.informed);
    }
  }

  SECTION("no stations anywhere: the origin alone") {
    auto out = rumor::run_env_fireworks_line(Law::point_mass(0), Law::geometric(0.9), 50,
                                             TrialRng(26, 0));
    CHECK(out.status == TrialStatus::died);
    CHECK(out.spreaders == 1);
    CHECK(out.informed == 1);
  }

  SECTION("station-max sampling reproduces the power-of-cdf law") {
    Law radius = Law::geometric(0.5);
    const std::int64_t n = 100000;
    std::vector<std::int64_t> counts(12, 0);
    TrialRng rng(27, 0);
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t r = rumor::detail::env_effective_radius(
          Law::point_mass(3), radius, rng, static_cast<std::uint64_t>(i),
          rumor::detail::kSiteRadiusSalt);
      ++counts[static_cast<std::size_t>(std::min<std::int64_t>(r, 11))];
    }
    double acc = 0.0;
    for (std::int64_t k = 0; k < 11; ++k) {
      double p = std::pow(1.0 - radius.tail(k + 1), 3.0) - std::pow(1.0 - radius.tail(k), 3.0);
      acc += static_cast<double>(counts[static_cast<std::size_t>(k)]) / static_cast<double>(n);
      double cdf3 = std::pow(1.0 - radius.tail(k + 1), 3.0);
      CHECK(std::abs(acc - cdf3) < 3.0 * std::sqrt(cdf3 * (1 - cdf3) / static_cast<double>(n)) +
                                       3.0 * std::sqrt(p / static_cast<double>(n)));
    }
  }

  SECTION("quenched run and annealed-radius run agree within a z-test") {
    SimConfig env;
    env.model = SimConfig::Model::env_fireworks_line;
    env.stations = Law::binomial(2, 0.5);
    env.radii = SequenceLaw::constant(Law::power_law_example());
    env.horizon = 500;
    auto a = estimate(env, 20000, 21, 2);
    SimConfig ann;
    ann.radii = SequenceLaw::constant(
        rumor::annealed_radius(Law::binomial(2, 0.5), Law::power_law_example()));
    ann.horizon = 500;
    auto b = estimate(ann, 20000, 22, 2);
    CHECK(std::abs(two_proportion_z(a.survived, 20000, b.survived, 20000)) < 2.576);

    SimConfig tenv;
    tenv.model = SimConfig::Model::env_cone;
    tenv.tree = TreeSpec::homogeneous(2);
    tenv.stations = Law::binomial(2, 0.5);
    tenv.radii = SequenceLaw::constant(Law::geometric(0.5));
    tenv.horizon = 30;
    auto c = estimate(tenv, 20000, 31, 2);
    SimConfig tann;
    tann.model = SimConfig::Model::cone;
    tann.tree = TreeSpec::homogeneous(2);
    tann.radii = SequenceLaw::constant(
        rumor::annealed_radius(Law::binomial(2, 0.5), Law::geometric(0.5)));
    tann.horizon = 30;
    auto d = estimate(tann, 20000, 32, 2);
    CHECK(std::abs(two_proportion_z(c.survived, 20000, d.survived, 20000)) < 2.576);
  }

  SECTION("model plumbing validation") {
    SimConfig bad;
    bad.model = SimConfig::Model::env_fireworks_line;
    CHECK_THROWS_AS(rumor::run_trial(bad, TrialRng(0, 0)), std::invalid_argument);
    SimConfig tree_missing;
    tree_missing.model = SimConfig::Model::cone;
    CHECK_THROWS_AS(rumor::run_trial(tree_missing, TrialRng(0, 0)), std::invalid_argument);
    SimConfig seq_on_tree;
    seq_on_tree.model = SimConfig::Model::disk;
    seq_on_tree.tree = TreeSpec::homogeneous(2);
    seq_on_tree.radii = SequenceLaw::bernoulli(rumor::BSeq::geometric(0.5, 0.5));
    CHECK_THROWS_AS(rumor::run_trial(seq_on_tree, TrialRng(0, 0)), std::invalid_argument);
  }
}

TEST_CASE("estimates: determinism, intervals, and bookkeeping", "[sim]") {
  SECTION("worker count never changes the result") {
    SimConfig cfg;
    cfg.model = SimConfig::Model::cone;
    cfg.tree = TreeSpec::galton_watson(Law::binomial(3, 0.5));
    cfg.radii = SequenceLaw::constant(Law::geometric(0.5));
    cfg.horizon = 25;
    auto one = estimate(cfg, 30000, 42, 1);
    for (int workers : {4, 8}) {
      auto many = estimate(cfg, 30000, 42, workers);
      REQUIRE(many.mean == one.mean);
      REQUIRE(many.survived == one.survived);
      REQUIRE(many.died == one.died);
      REQUIRE(many.dead_by_residual == one.dead_by_residual);
      REQUIRE(many.truncated == one.truncated);
      REQUIRE(many.ci_low == one.ci_low);
      REQUIRE(many.ci_high == one.ci_high);
      REQUIRE(many.mean_spreaders == one.mean_spreaders);
      REQUIRE(many.mean_informed == one.mean_informed);
      REQUIRE(many.bias_bound == one.bias_bound);
    }
  }

  SECTION("interval covers a fair coin and has the right width") {
    auto est = estimate_fn(
        [](const TrialRng& rng) {
          TrialOutcome o;
          o.status = rng.uniform01(0, 0) < 0.5 ? TrialStatus::survived_to_horizon
                                               : TrialStatus::died;
          o.informed = 1;
          return o;
        },
        200000, 2718, 2, 1);
    CHECK(est.ci_low <= 0.5);
    CHECK(est.ci_high >= 0.5);
    double width = est.ci_high - est.ci_low;
    CHECK(width == Catch::Approx(2.0 * 1.96 * std::sqrt(0.25 / 200000.0)).margin(3e-4));
  }

  SECTION("truncated trials are excluded from every mean") {
    auto est = estimate_fn(
        [](const TrialRng& rng) {
          TrialOutcome o;
          std::uint64_t t = rng.bits(0, 0);  // any keyed draw; per-trial distinct
          (void)t;
          o.spreaders = 10;
          o.informed = 10;
          o.status = TrialStatus::survived_to_horizon;
          return o;
        },
        1000, 1, 2, 1);
    CHECK(est.mean == 1.0);
    CHECK(est.mean_spreaders == 10.0);

    std::int64_t calls = 0;
    auto mixed = estimate_fn(
        [](const TrialRng& rng) {
          TrialOutcome o;
          bool cut = rng.uniform01(1, 1) < 0.25;
          o.status = cut ? TrialStatus::truncated : TrialStatus::died;
          o.spreaders = cut ? 1000000 : 4;  // must not leak into the means
          o.informed = o.spreaders;
          return o;
        },
        40000, 3, 2, 1);
    (void)calls;
    CHECK(mixed.truncated > 9000);
    CHECK(mixed.truncated < 11000);
    CHECK(mixed.truncated + mixed.died == 40000);
    CHECK(mixed.mean == 0.0);
    CHECK(mixed.mean_spreaders == 4.0);
    CHECK(mixed.mean_informed == 4.0);
  }

  SECTION("a throwing trial aborts the whole estimate") {
    auto boom = [](const TrialRng& rng) -> TrialOutcome {
      if (rng.uniform01(9, 9) < 1e-3) throw std::runtime_error("bad trial");
      TrialOutcome o;
      o.status = TrialStatus::died;
      o.informed = 1;
      return o;
    };
    CHECK_THROWS_AS(estimate_fn(boom, 50000, 4, 4, 1), std::runtime_error);
    CHECK_THROWS_AS(estimate_fn(boom, 50000, 4, 1, 1), std::runtime_error);
  }

  SECTION("window bookkeeping on the line") {
    SimConfig cfg;
    cfg.radii = SequenceLaw::constant(Law::geometric(0.55));
    cfg.horizon = 64;
    for (std::uint64_t t = 0; t < 300; ++t) {
      auto out = rumor::run_trial(cfg, TrialRng(28, t));
      if (out.status == TrialStatus::died) {
        REQUIRE(out.informed == out.reach + 1);
        REQUIRE(out.reach < 64);
      } else {
        REQUIRE(out.status == TrialStatus::survived_to_horizon);
        REQUIRE(out.informed == 64);
        REQUIRE(out.reach >= 64);
      }
    }
  }

  SECTION("residual deaths accumulate their restart mass as the bias bound") {
    SimConfig rev;
    rev.model = SimConfig::Model::reverse_line;
    rev.radii = SequenceLaw::constant(Law::geometric(0.5));
    rev.horizon = 1 << 20;
    rev.eps_residual = 1e-6;
    auto est = estimate(rev, 5000, 6, 2);
    CHECK(est.dead_by_residual > 0);
    CHECK(est.bias_bound > 0.0);
    CHECK(est.bias_bound < 1e-6);

    SimConfig fw;
    fw.radii = SequenceLaw::constant(Law::bernoulli(0.9));
    fw.horizon = 6;
    auto direct = estimate(fw, 2000, 7, 2);
    CHECK(direct.bias_bound == 0.0);
    CHECK(direct.dead_by_residual == 0);
  }

  SECTION("estimate validation") {
    SimConfig cfg;
    CHECK_THROWS_AS(estimate(cfg, 0, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("simulated survival tracks the analytic series", "[sim]") {
  SECTION("geometric radii: series value, DP, and Monte Carlo form one chain") {
    Law R = Law::geometric(0.6);
    auto rep = rumor::fireworks_survival(R);
    REQUIRE(rep.classification == rumor::Classification::survives_pos_prob);
    REQUIRE(rep.probability.has_value());
    double dp = lead_dp(R, 400);
    // the DP at a deep horizon converges to the series value from above
    CHECK(dp >= *rep.probability - 1e-12);
    CHECK(dp - *rep.probability < 2e-4);
    SimConfig cfg;
    cfg.radii = SequenceLaw::constant(R);
    cfg.horizon = 400;
    auto est = estimate(cfg, 40000, 34, 2);
    CHECK(std::abs(est.mean - dp) < 3.0 * std::sqrt(dp * (1 - dp) / 40000.0));
  }

  SECTION("power-law example: half of all runs spread forever") {
    Law R = Law::power_law_example();
    auto rep = rumor::fireworks_survival(R);
    REQUIRE(rep.probability.has_value());
    CHECK(*rep.probability == Catch::Approx(0.5).epsilon(0.0).margin(1e-9));
    double dp = lead_dp(R, 2000);
    CHECK(dp >= 0.5);
    CHECK(dp - 0.5 < 2e-3);
    SimConfig cfg;
    cfg.radii = SequenceLaw::constant(R);
    cfg.horizon = 2000;
    auto est = estimate(cfg, 20000, 35, 2);
    CHECK(std::abs(est.mean - dp) < 3.0 * std::sqrt(dp * (1 - dp) / 20000.0));
  }
}
