#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "combnet/cauchy.hpp"
#include "combnet/delivery_base.hpp"

namespace combnet {

namespace detail {

// Salt layout keeps every coefficient matrix reproducible from the plan salt:
// stage 0 = per-piece combination rows, 1 = per-cover stage-1, 2 = per-relay
// stage-2.
inline std::uint64_t piece_salt(std::uint64_t plan_salt, std::uint64_t msg_rank, int relay) {
  return derive_salt(0, msg_rank, relay, plan_salt);
}
inline std::uint64_t stage1_salt(std::uint64_t plan_salt, int relay, std::uint64_t v_mask) {
  return derive_salt(1, relay, v_mask, plan_salt);
}
inline std::uint64_t stage2_salt(std::uint64_t plan_salt, int relay) {
  return derive_salt(2, relay, 0, plan_salt);
}

}  // namespace detail

// Compiles the improved delivery: phase 1 as in the base scheme, then per
// (piece, other relay) coefficient rows are pooled into X-sets keyed by
// (receivers, knowers), combined per cover V in stage 1 (c packets) and per
// relay in stage 2 (c' packets). Only the stage-2 combinations touch a link.
inline DeliveryPlan compile_improved_plan(const Topology& topo, const Placement& pl,
                                          const DemandVector& dv, const PlanOptions& opt = {}) {
  DeliveryPlan plan;
  detail::init_plan(plan, Scheme::improved, topo, pl, dv, opt);
  const int H = topo.num_relays();
  const int r = topo.degree();
  const Field& field = field_for(opt.field);

  // (relay h', W1 mask, W2 mask) -> X-set
  std::map<std::tuple<int, std::uint64_t, std::uint64_t>, XSetDesc> xsets;
  std::uint64_t max_points = 0;  // largest (rows + cols) any combination needs

  detail::for_each_phase1_piece(topo, pl.t(), [&](const detail::Phase1Piece& piece) {
    detail::emit_with_forwards(plan, 1, piece.relay, topo.relay_users(piece.relay),
                               opt.keep_transmissions ? detail::piece_tag(piece) : std::string{},
                               piece.length, PieceRef{piece.msg_rank, piece.relay, piece.offset,
                                                      piece.length},
                               opt.keep_transmissions);

    const std::uint64_t missing = piece.j_mask & ~topo.user_mask_of_relay(piece.relay);
    if (!missing) return;
    const int rows_per_relay = piece.length / r;
    int row_cursor = 0;
    for (int h_prime = 1; h_prime <= H; ++h_prime) {
      if (h_prime == piece.relay) continue;
      const std::uint64_t a_mask = topo.user_mask_of_relay(h_prime) & missing;
      if (!a_mask) continue;
      std::uint32_t h_a = 0;
      for (std::uint64_t m = a_mask; m;) {
        const int k = std::countr_zero(m) + 1;
        m &= m - 1;
        h_a |= topo.relay_mask_of_user(k);
      }
      const std::uint32_t allowed = h_a | (std::uint32_t{1} << (piece.relay - 1));
      std::uint64_t b_mask = 0;
      for (int j : topo.relay_users(piece.relay)) {
        const std::uint32_t hj = topo.relay_mask_of_user(j);
        if ((hj >> (h_prime - 1) & 1) && (hj & ~allowed) == 0)
          b_mask |= std::uint64_t{1} << (j - 1);
      }
      auto& xs = xsets[{h_prime, a_mask, b_mask}];
      if (xs.w1.empty()) {
        xs.w1 = subset_of_mask(a_mask);
        xs.w2 = subset_of_mask(b_mask);
      }
      if (opt.keep_transmissions)
        xs.entries.push_back({{piece.msg_rank, piece.relay, piece.offset, piece.length},
                              row_cursor, rows_per_relay});
      xs.packet_count += rows_per_relay;
      row_cursor += rows_per_relay;
    }
    max_points = std::max<std::uint64_t>(max_points, row_cursor + piece.length);
  });

  // Stage 1: per (relay, cover) collect the X-sets with W1 + W2 == V and the
  // worst-case unknown count c over the users of V.
  std::map<std::pair<int, std::uint64_t>, std::vector<decltype(xsets)::iterator>> covers;
  for (auto it = xsets.begin(); it != xsets.end(); ++it) {
    const auto& [relay, w1, w2] = it->first;
    covers[{relay, w1 | w2}].push_back(it);
  }

  struct LRef {
    std::uint64_t v_mask;
    LSetDesc l;
  };
  std::map<int, std::vector<LRef>> relay_lsets;
  for (auto& [key, members] : covers) {
    const auto& [relay, v_mask] = key;
    std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
      const auto& [ra, w1a, w2a] = a->first;
      const auto& [rb, w1b, w2b] = b->first;
      if (w1a != w1b) return lex_less_masks(w1a, w1b);
      return lex_less_masks(w2a, w2b);
    });
    std::int64_t c = 0, total = 0;
    for (std::uint64_t v = v_mask; v;) {
      const int k = std::countr_zero(v) + 1;
      v &= v - 1;
      std::int64_t unknown = 0;
      for (const auto& m : members)
        if (!(std::get<2>(m->first) >> (k - 1) & 1)) unknown += m->second.packet_count;
      c = std::max(c, unknown);
    }
    LSetDesc l;
    l.cover = subset_of_mask(v_mask);
    l.c = c;
    for (const auto& m : members) {
      total += m->second.packet_count;
      l.xsets.push_back(std::move(m->second));
    }
    max_points = std::max<std::uint64_t>(max_points, c + total);
    relay_lsets[relay].push_back({v_mask, std::move(l)});
  }

  // Stage 2: one transmission per relay covering all of its L-sets. An L-set
  // is known to user k only if k is a knower of every nonempty source X-set,
  // including covers k is not part of (the reading Example 2 pins down).
  for (auto& [relay, lrefs] : relay_lsets) {
    std::sort(lrefs.begin(), lrefs.end(),
              [](const LRef& a, const LRef& b) { return lex_less_masks(a.v_mask, b.v_mask); });
    std::int64_t c_prime = 0, total = 0;
    for (int k : topo.relay_users(relay)) {
      std::int64_t unknown = 0;
      for (const auto& lr : lrefs) {
        bool known = true;
        for (const auto& xs : lr.l.xsets)
          if (!std::binary_search(xs.w2.begin(), xs.w2.end(), k)) {
            known = false;
            break;
          }
        if (!known) unknown += lr.l.c;
      }
      c_prime = std::max(c_prime, unknown);
    }
    for (const auto& lr : lrefs) total += lr.l.c;
    max_points = std::max<std::uint64_t>(max_points, c_prime + total);
    if (c_prime == 0) continue;

    RlcStage2Payload payload;
    payload.relay = relay;
    payload.c_prime = c_prime;
    if (opt.keep_transmissions)
      for (auto& lr : lrefs) payload.lsets.push_back(std::move(lr.l));
    detail::emit_with_forwards(plan, 2, relay, topo.relay_users(relay),
                               opt.keep_transmissions
                                   ? "p2-rlc relay=" + std::to_string(relay) +
                                         " c'=" + std::to_string(c_prime)
                                   : std::string{},
                               c_prime, std::move(payload), opt.keep_transmissions);
  }

  plan.required_points = max_points;
  if (!opt.ignore_field_capacity && max_points > field.order()) {
    if (max_points <= (std::uint64_t{1} << 16))
      throw config_error("improved plan: a combination needs " + std::to_string(max_points) +
                         " distinct points, more than GF(2^" +
                         std::to_string(opt.field.degree) + ") offers; use field degree 16");
    throw config_error("improved plan: a combination needs " + std::to_string(max_points) +
                       " distinct points, beyond GF(2^16); loads stay exact but bit-level "
                       "simulation is unavailable at this size");
  }
  return plan;
}

// Picks the smallest supported field that fits every combination; past
// GF(2^16) the plan is still compiled for its exact loads.
inline DeliveryPlan compile_improved_plan_auto(const Topology& topo, const Placement& pl,
                                               const DemandVector& dv, PlanOptions opt = {}) {
  opt.ignore_field_capacity = true;
  opt.field = FieldSpec::gf256();
  DeliveryPlan plan = compile_improved_plan(topo, pl, dv, opt);
  if (plan.required_points > field_for(plan.field).order()) plan.field = FieldSpec::gf65536();
  return plan;
}

inline DeliveryPlan compile_plan(Scheme scheme, const Topology& topo, const Placement& pl,
                                 const DemandVector& dv, const PlanOptions& opt = {}) {
  return scheme == Scheme::base ? compile_base_plan(topo, pl, dv, opt)
                                : compile_improved_plan(topo, pl, dv, opt);
}

}  // namespace combnet
