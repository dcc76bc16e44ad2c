#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "combnet/combinatorics.hpp"
#include "combnet/gf.hpp"
#include "combnet/placement.hpp"
#include "combnet/rational.hpp"
#include "combnet/topology.hpp"

namespace combnet {

enum class Scheme { base, improved };

inline std::string scheme_name(Scheme s) { return s == Scheme::base ? "base" : "improved"; }

struct Link {
  enum class Type { server_to_relay, relay_to_user };
  Type type = Type::server_to_relay;
  int relay = 0;
  int user = 0;  // only for relay_to_user

  static Link to_relay(int h) { return {Type::server_to_relay, h, 0}; }
  static Link to_user(int h, int k) { return {Type::relay_to_user, h, k}; }
  auto operator<=>(const Link&) const = default;

  std::string str() const {
    if (type == Type::server_to_relay) return "server->relay" + std::to_string(relay);
    return "relay" + std::to_string(relay) + "->user" + std::to_string(user);
  }
};

// A contiguous packet range of one multicast message, as transmitted to (or
// carved out for) one relay.
struct PieceRef {
  std::uint64_t msg_rank = 0;  // lex rank of J
  int relay = 0;               // the member of S_J this piece was routed to
  int offset = 0;              // first packet position within the message
  int length = 0;              // packets
};

// One bucket P^{relay}_{user, Q}: sub-pieces this user must still recover via
// this relay, each known to the users in Q. Parts are kept in (J, relay)
// order so XOR alignment is reproducible.
struct BucketStream {
  int user = 0;
  Subset q;
  std::vector<PieceRef> parts;
  std::int64_t length() const {
    std::int64_t n = 0;
    for (const auto& p : parts) n += p.length;
    return n;
  }
};

// Phase-2 transmission of the base scheme: the position-wise XOR of the
// bucket streams of the r users in `cover` (shorter streams zero-padded).
struct XorGroupPayload {
  Subset cover;
  std::vector<BucketStream> buckets;
};

// A slice of the deterministic coefficient rows drawn against one phase-1
// piece. Rows of one piece share a single Cauchy matrix, so any piece-many of
// them are jointly solvable.
struct XEntry {
  PieceRef piece;
  int row_begin = 0;
  int row_count = 0;
};

// X^{relay}_{W1, W2}: packets to be recovered by W1 from this relay, already
// known to W2.
struct XSetDesc {
  Subset w1;
  Subset w2;
  std::vector<XEntry> entries;
  std::int64_t packet_count = 0;
};

// L^{relay}_{cover}: stage-1 combination over all X-sets whose key union is
// `cover`, c packets long.
struct LSetDesc {
  Subset cover;
  std::int64_t c = 0;
  std::vector<XSetDesc> xsets;
};

// Stage-2 transmission of the improved scheme: c' combinations over the
// concatenated L-sets of one relay.
struct RlcStage2Payload {
  int relay = 0;
  std::int64_t c_prime = 0;
  std::vector<LSetDesc> lsets;
};

// Relay-to-user copy of an earlier server-to-relay transmission (relays have
// no caches and only forward).
struct ForwardPayload {
  std::size_t source_index = 0;
};

using Payload = std::variant<std::monostate, PieceRef, XorGroupPayload, RlcStage2Payload,
                             ForwardPayload>;

struct Transmission {
  int phase = 1;
  Link link;
  std::string tag;
  std::int64_t length_pkts = 0;
  Payload payload;
};

// Both delivery phases always yield integral packet counts with this choice:
// phase 1 divides a message by |S_J| <= H and phase 2 additionally by r.
inline int packets_per_subfile(const Topology& topo) {
  return static_cast<int>(topo.degree() * lcm_upto(topo.num_relays()));
}

struct DeliveryPlan {
  Scheme scheme = Scheme::base;
  int num_relays = 0;
  int degree = 0;
  int num_users = 0;
  int num_files = 0;
  int t = 0;
  int packets_per_subfile = 0;
  std::int64_t file_packets = 0;  // C(K,t) * s
  DemandVector demand;
  std::uint64_t salt = 0;
  FieldSpec field;
  // largest (rows + columns) any coefficient matrix of this plan needs; the
  // MDS construction requires that many distinct field points
  std::uint64_t required_points = 0;

  std::vector<Transmission> transmissions;  // may be empty in loads-only mode
  std::map<Link, std::int64_t> link_pkts;

  void account(const Link& link, std::int64_t pkts) { link_pkts[link] += pkts; }

  Rational link_load(const Link& link) const {
    auto it = link_pkts.find(link);
    return it == link_pkts.end() ? Rational(0) : Rational(BigInt(it->second), BigInt(file_packets));
  }

  Rational server_relay_load(int relay) const { return link_load(Link::to_relay(relay)); }

  Rational max_link_load() const {
    std::int64_t best = 0;
    for (const auto& [link, pkts] : link_pkts) best = std::max(best, pkts);
    return Rational(BigInt(best), BigInt(file_packets));
  }

  Rational phase_load(int relay, int phase) const {
    std::int64_t pkts = 0;
    for (const auto& tr : transmissions)
      if (tr.phase == phase && tr.link == Link::to_relay(relay)) pkts += tr.length_pkts;
    return Rational(BigInt(pkts), BigInt(file_packets));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["scheme"] = scheme_name(scheme);
    j["relays"] = num_relays;
    j["degree"] = degree;
    j["users"] = num_users;
    j["files"] = num_files;
    j["t"] = t;
    j["packets_per_subfile"] = packets_per_subfile;
    j["file_packets"] = file_packets;
    j["demand"] = demand.d;
    j["salt"] = salt;
    j["field_degree"] = field.degree;
    auto& txs = j["transmissions"] = nlohmann::json::array();
    for (const auto& tr : transmissions) {
      nlohmann::json link{{"type", tr.link.type == Link::Type::server_to_relay
                                       ? "server_to_relay"
                                       : "relay_to_user"},
                          {"relay", tr.link.relay}};
      if (tr.link.type == Link::Type::relay_to_user) link["user"] = tr.link.user;
      txs.push_back({{"phase", tr.phase},
                     {"link", std::move(link)},
                     {"tag", tr.tag},
                     {"length_pkts", tr.length_pkts}});
    }
    auto& loads = j["per_link_load"];
    loads = nlohmann::json::object();
    for (const auto& [link, pkts] : link_pkts)
      loads[link.str()] = ratio_string(Rational(BigInt(pkts), BigInt(file_packets)));
    j["max_link_load"] = ratio_string(max_link_load());
    return j;
  }
};

}  // namespace combnet
