#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "combnet/combinatorics.hpp"
#include "combnet/errors.hpp"
#include "combnet/rational.hpp"
#include "combnet/topology.hpp"

namespace combnet {

namespace detail {

// Sum of (1 + min_h |J \ U_h| / r) over all subsets J of the given size,
// divided by H * C(K,t). min_h |J \ U_h| = |J| - max_h |U_h cut J|.
inline Rational load_sum(const Topology& topo, int t, int subset_size) {
  const int K = topo.num_users();
  const int H = topo.num_relays();
  const int r = topo.degree();
  if (subset_size < 0 || subset_size > K) return Rational(0);
  BigInt numerator = 0;  // counts r + min, i.e. the sum scaled by r
  std::vector<std::uint64_t> relay_masks(H);
  for (int h = 1; h <= H; ++h) relay_masks[h - 1] = mask_of(topo.relay_users(h));
  for_each_subset(K, subset_size, [&](const Subset& J) {
    const std::uint64_t j_mask = mask_of(J);
    int max_overlap = 0;
    for (const std::uint64_t um : relay_masks)
      max_overlap = std::max(max_overlap, std::popcount(j_mask & um));
    numerator += r + (subset_size - max_overlap);
  });
  return Rational(numerator, BigInt(r) * H * binomial(K, t));
}

}  // namespace detail

// Closed-form max link-load of the base delivery. The summation runs over
// subsets of size t+1; reproducing the worked example (H=4, r=2, t=2 gives
// 7/15) forces that index even though the displayed formula writes |J| = t.
inline Rational closed_form_load(const Topology& topo, int t) {
  if (t < 0 || t > topo.num_users()) throw parameter_error("closed_form_load: t out of range");
  if (topo.num_users() > 64) throw parameter_error("closed_form_load: requires K <= 64");
  return detail::load_sum(topo, t, t + 1);
}

// The formula exactly as printed, summing over |J| = t. Exposed for
// comparison only; it does not match the worked examples.
inline Rational closed_form_load_literal(const Topology& topo, int t) {
  if (t < 0 || t > topo.num_users()) throw parameter_error("closed_form_load: t out of range");
  if (topo.num_users() > 64) throw parameter_error("closed_form_load: requires K <= 64");
  return detail::load_sum(topo, t, t);
}

// C(K,t+1) * (1 + t/r) / (H * C(K,t)): the relaxation used to prove the
// optimality factor.
inline Rational simplified_upper_bound(const Topology& topo, int t) {
  const int K = topo.num_users();
  if (t < 0 || t > K - 1) throw parameter_error("simplified_upper_bound: t must be in [0..K-1]");
  const int r = topo.degree();
  return Rational(BigInt(binomial(K, t + 1)) * (r + t),
                  BigInt(topo.num_relays()) * binomial(K, t) * r);
}

struct TradeoffCurve {
  enum class Kind { achievable, lower_bound };
  Kind kind = Kind::achievable;
  std::vector<std::pair<Rational, Rational>> points;  // (M, load), M strictly increasing
};

// Lower convex envelope via monotone chain; keeps only the hull vertices.
inline TradeoffCurve lower_convex_envelope(TradeoffCurve curve) {
  auto& pts = curve.points;
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first == pts[i - 1].first)
      throw parameter_error("envelope: duplicate memory points");
  std::vector<std::pair<Rational, Rational>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // drop b if it lies on or above segment a-p
      if ((b.second - a.second) * (p.first - a.first) >=
          (p.second - a.second) * (b.first - a.first))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  curve.points = std::move(hull);
  return curve;
}

// Piecewise-linear evaluation on the hull; clamps outside the M range.
inline Rational evaluate_curve(const TradeoffCurve& curve, const Rational& memory) {
  const auto& pts = curve.points;
  if (pts.empty()) throw parameter_error("evaluate_curve: empty curve");
  if (memory <= pts.front().first) return pts.front().second;
  if (memory >= pts.back().first) return pts.back().second;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (memory <= pts[i].first) {
      const auto& [m0, v0] = pts[i - 1];
      const auto& [m1, v1] = pts[i];
      return v0 + (v1 - v0) * (memory - m0) / (m1 - m0);
    }
  }
  return pts.back().second;
}

// Cut-set style lower bound under uncoded placement: the lower convex
// envelope of (Nt/K, C(K,t+1)/(H C(K,t))) for t in [0..K-1] plus (N, 0).
// Stated for N >= K; for smaller N the curve is still computed and
// `hypothesis_met` reports the violation.
inline TradeoffCurve cutset_lower_envelope(const Topology& topo, int num_files,
                                           bool* hypothesis_met = nullptr) {
  const int K = topo.num_users();
  if (num_files < 1) throw parameter_error("cutset_lower_envelope: need at least one file");
  if (hypothesis_met) *hypothesis_met = num_files >= K;
  TradeoffCurve curve;
  curve.kind = TradeoffCurve::Kind::lower_bound;
  for (int t = 0; t <= K - 1; ++t)
    curve.points.emplace_back(
        Rational(BigInt(num_files) * t, BigInt(K)),
        Rational(BigInt(binomial(K, t + 1)), BigInt(topo.num_relays()) * binomial(K, t)));
  curve.points.emplace_back(Rational(num_files), Rational(0));
  return lower_convex_envelope(std::move(curve));
}

// Single cut-set grid point C(K,t+1) / (H C(K,t)), before the envelope.
inline Rational cutset_point(const Topology& topo, int t) {
  const int K = topo.num_users();
  if (t < 0 || t > K) throw parameter_error("cutset_point: t out of range");
  return Rational(BigInt(binomial(K, t + 1)), BigInt(topo.num_relays()) * binomial(K, t));
}

struct GapReport {
  Rational uncoded_gap;   // measured / cut-set envelope at M = tN/K
  Rational general_gap;   // x2: uncoded-vs-coded placement factor
};

inline GapReport gap_report(const Topology& topo, int num_files, int t,
                            const Rational& measured_load, const TradeoffCurve& cutset) {
  const Rational memory(BigInt(num_files) * t, BigInt(topo.num_users()));
  const Rational bound = evaluate_curve(cutset, memory);
  Rational gap;
  if (bound == 0) {
    if (measured_load != 0)
      throw internal_error("gap_report: positive load against a zero lower bound");
    gap = 1;  // both sides zero (full caching)
  } else {
    gap = measured_load / bound;
  }
  return {gap, 2 * gap};
}

}  // namespace combnet
