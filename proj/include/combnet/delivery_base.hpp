#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "combnet/combinatorics.hpp"
#include "combnet/errors.hpp"
#include "combnet/placement.hpp"
#include "combnet/plan.hpp"
#include "combnet/topology.hpp"

namespace combnet {

// S_J: all relays wired to the largest number of users in J, ascending.
inline Subset select_relays(const Topology& topo, const Subset& J) {
  if (J.empty()) throw parameter_error("select_relays: J must be nonempty");
  int best = -1;
  Subset relays;
  for (int h = 1; h <= topo.num_relays(); ++h) {
    const Subset& users = topo.relay_users(h);
    int overlap = 0;
    auto a = users.begin();
    auto b = J.begin();
    while (a != users.end() && b != J.end()) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else ++overlap, ++a, ++b;
    }
    if (overlap > best) {
      best = overlap;
      relays.clear();
    }
    if (overlap == best) relays.push_back(h);
  }
  return relays;
}

// Q^k_{h,h'}: users wired to both h and h' whose relay set lies inside
// H_k + {h}. Always r-1 users.
inline Subset q_set(const Topology& topo, int k, int h, int h_prime) {
  const std::uint32_t hk = topo.relay_mask_of_user(k);
  if (!(hk >> (h_prime - 1) & 1))
    throw parameter_error("q_set: user must be connected to relay h'");
  if (hk >> (h - 1) & 1) throw parameter_error("q_set: user must not be connected to relay h");
  const std::uint32_t allowed = hk | (std::uint32_t{1} << (h - 1));
  Subset q;
  for (int j : topo.relay_users(h)) {
    const std::uint32_t hj = topo.relay_mask_of_user(j);
    if ((hj >> (h_prime - 1) & 1) && (hj & ~allowed) == 0) q.push_back(j);
  }
  return q;
}

struct PlanOptions {
  bool keep_transmissions = true;  // false: account loads only
  std::uint64_t salt = 0;
  FieldSpec field = FieldSpec::gf256();
  // compile even when no supported field can host the coefficient matrices;
  // such plans still carry exact loads but cannot be simulated bit-level
  bool ignore_field_capacity = false;
};

namespace detail {

struct Phase1Piece {
  std::uint64_t msg_rank;
  const Subset& J;
  std::uint64_t j_mask;
  int relay;
  int offset;  // packet offset inside the message
  int length;  // packets
};

// Enumerates phase-1 pieces in (J, relay) order: each message W_J is split
// into |S_J| equal pieces, one per relay of S_J in ascending order.
template <typename Fn>
void for_each_phase1_piece(const Topology& topo, int t, Fn&& fn) {
  const int s = packets_per_subfile(topo);
  std::uint64_t msg_rank = 0;
  for_each_subset(topo.num_users(), t + 1, [&](const Subset& J) {
    const Subset s_j = select_relays(topo, J);
    const int piece_len = s / static_cast<int>(s_j.size());
    const std::uint64_t j_mask = mask_of(J);
    for (std::size_t i = 0; i < s_j.size(); ++i)
      fn(Phase1Piece{msg_rank, J, j_mask, s_j[i], static_cast<int>(i) * piece_len, piece_len});
    ++msg_rank;
  });
}

inline void init_plan(DeliveryPlan& plan, Scheme scheme, const Topology& topo,
                      const Placement& pl, const DemandVector& dv, const PlanOptions& opt) {
  pl.check_demand(dv);
  if (pl.num_users() != topo.num_users())
    throw parameter_error("plan: placement and topology disagree on user count");
  if (topo.num_users() > 64)
    throw parameter_error("plan: delivery compilation requires K <= 64 users");
  plan.scheme = scheme;
  plan.num_relays = topo.num_relays();
  plan.degree = topo.degree();
  plan.num_users = topo.num_users();
  plan.num_files = pl.num_files();
  plan.t = pl.t();
  plan.packets_per_subfile = packets_per_subfile(topo);
  plan.file_packets = static_cast<std::int64_t>(pl.subfiles_per_file()) * plan.packets_per_subfile;
  plan.demand = dv;
  plan.salt = opt.salt;
  plan.field = opt.field;
}

inline std::string piece_tag(const Phase1Piece& p) {
  return "p1 J=" + subset_string(p.J) + " relay=" + std::to_string(p.relay) + " pkts=[" +
         std::to_string(p.offset) + "," + std::to_string(p.offset + p.length) + ")";
}

// Emits one server->relay transmission plus the relay's forwarded copies.
inline void emit_with_forwards(DeliveryPlan& plan, int phase, int relay,
                               const Subset& receivers, std::string tag, std::int64_t length,
                               Payload payload, bool keep) {
  plan.account(Link::to_relay(relay), length);
  for (int k : receivers) plan.account(Link::to_user(relay, k), length);
  if (!keep) return;
  const std::size_t src = plan.transmissions.size();
  plan.transmissions.push_back({phase, Link::to_relay(relay), tag, length, std::move(payload)});
  for (int k : receivers)
    plan.transmissions.push_back(
        {phase, Link::to_user(relay, k), tag, length, ForwardPayload{src}});
}

}  // namespace detail

// Compiles the two-phase delivery into an explicit plan. Phase 1 routes each
// message piece through its argmax relays; phase 2 splits every piece still
// owed to a user into r sub-pieces, buckets them by (relay, user, Q-set) and
// XORs the r bucket streams of each cover V into one transmission.
inline DeliveryPlan compile_base_plan(const Topology& topo, const Placement& pl,
                                      const DemandVector& dv, const PlanOptions& opt = {}) {
  DeliveryPlan plan;
  detail::init_plan(plan, Scheme::base, topo, pl, dv, opt);
  const int r = topo.degree();

  // (relay h', cover mask V, user k) -> bucket parts, V = {k} + Q^k_{h,h'}
  std::map<std::tuple<int, std::uint64_t, int>, std::vector<PieceRef>> buckets;

  detail::for_each_phase1_piece(topo, pl.t(), [&](const detail::Phase1Piece& piece) {
    detail::emit_with_forwards(plan, 1, piece.relay, topo.relay_users(piece.relay),
                               opt.keep_transmissions ? detail::piece_tag(piece) : std::string{},
                               piece.length, PieceRef{piece.msg_rank, piece.relay, piece.offset,
                                                      piece.length},
                               opt.keep_transmissions);

    const std::uint64_t covered = topo.user_mask_of_relay(piece.relay);
    std::uint64_t missing = piece.j_mask & ~covered;
    const int sub_len = piece.length / r;
    while (missing) {
      const int k = std::countr_zero(missing) + 1;
      missing &= missing - 1;
      const Subset& relays_of_k = topo.user_relays(k);
      for (std::size_t i = 0; i < relays_of_k.size(); ++i) {
        const int h_prime = relays_of_k[i];
        const Subset q = q_set(topo, k, piece.relay, h_prime);
        if (static_cast<int>(q.size()) != r - 1)
          throw internal_error("phase2: Q-set cardinality must be r-1");
        const std::uint64_t v_mask = mask_of(q) | (std::uint64_t{1} << (k - 1));
        buckets[{h_prime, v_mask, k}].push_back(
            {piece.msg_rank, piece.relay, piece.offset + static_cast<int>(i) * sub_len, sub_len});
      }
    }
  });

  // Emit the XOR groups: relays ascending, covers in lexicographic order.
  for (auto it = buckets.begin(); it != buckets.end();) {
    const int relay = std::get<0>(it->first);
    auto relay_end = it;
    std::vector<std::uint64_t> v_masks;
    while (relay_end != buckets.end() && std::get<0>(relay_end->first) == relay) {
      if (v_masks.empty() || v_masks.back() != std::get<1>(relay_end->first))
        v_masks.push_back(std::get<1>(relay_end->first));
      ++relay_end;
    }
    std::sort(v_masks.begin(), v_masks.end(), lex_less_masks);

    for (std::uint64_t v_mask : v_masks) {
      const Subset cover = subset_of_mask(v_mask);
      XorGroupPayload group{cover, {}};
      std::int64_t group_len = 0;
      for (int k : cover) {
        auto b = buckets.find({relay, v_mask, k});
        if (b == buckets.end()) continue;
        BucketStream stream{k, {}, std::move(b->second)};
        for (int q_user : cover)
          if (q_user != k) stream.q.push_back(q_user);
        group_len = std::max(group_len, stream.length());
        group.buckets.push_back(std::move(stream));
      }
      if (group_len == 0) continue;
      detail::emit_with_forwards(
          plan, 2, relay, cover,
          opt.keep_transmissions
              ? "p2 relay=" + std::to_string(relay) + " V=" + subset_string(cover)
              : std::string{},
          group_len, std::move(group), opt.keep_transmissions);
    }
    it = relay_end;
  }
  return plan;
}

}  // namespace combnet
