#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "combnet/analysis.hpp"
#include "combnet/cauchy.hpp"
#include "combnet/delivery_improved.hpp"
#include "combnet/placement.hpp"
#include "combnet/plan.hpp"
#include "combnet/symbol.hpp"

namespace combnet {

struct SimulationConfig {
  FieldSpec field;
  int packets_per_subfile = 0;
  std::uint64_t salt = 0;
  DemandVector demand;
  Scheme scheme = Scheme::base;

  static SimulationConfig for_plan(const DeliveryPlan& plan) {
    return {plan.field, plan.packets_per_subfile, plan.salt, plan.demand, plan.scheme};
  }
};

// Pseudorandom but reproducible file contents; only tests that compare
// concrete symbol values need this.
inline Field::Elem packet_value(const Field& f, std::uint64_t salt, Coord c) {
  return static_cast<Field::Elem>(splitmix64(salt ^ (c * 0x9E3779B97F4A7C15ull)) &
                                  (f.order() - 1));
}

inline Field::Elem evaluate_symbol(const Field& f, const SymbolVector& v, std::uint64_t salt) {
  Field::Elem acc = 0;
  for (const auto& [coord, coeff] : v.terms())
    acc = Field::add(acc, f.mul(coeff, packet_value(f, salt, coord)));
  return acc;
}

// Expands plan payload descriptors into concrete symbol vectors. Server-side
// payloads are materialized once and shared by the forwarded copies.
class PlanMaterializer {
 public:
  PlanMaterializer(const Topology& topo, const Placement& pl, const DeliveryPlan& plan)
      : topo_(&topo), pl_(&pl), plan_(&plan), field_(&field_for(plan.field)) {
    layout_ = {pl.subfiles_per_file(), plan.packets_per_subfile, pl.num_files()};
    cache_.resize(plan.transmissions.size());
  }

  const BasisLayout& layout() const { return layout_; }
  const Field& field() const { return *field_; }

  const std::vector<SymbolVector>& packets(std::size_t tx_index) {
    const Transmission& tx = plan_->transmissions.at(tx_index);
    if (const auto* fwd = std::get_if<ForwardPayload>(&tx.payload)) {
      if (fwd->source_index >= plan_->transmissions.size())
        throw internal_error("materialize: forward without a server-side source");
      return packets(fwd->source_index);
    }
    auto& slot = cache_[tx_index];
    if (!slot) slot = materialize(tx);
    return *slot;
  }

 private:
  const MulticastMessage& message(std::uint64_t msg_rank) {
    auto it = messages_.find(msg_rank);
    if (it == messages_.end()) {
      const Subset J = unrank_subset(msg_rank, pl_->num_users(), pl_->t() + 1);
      it = messages_.emplace(msg_rank, make_multicast_message(*pl_, plan_->demand, J, msg_rank))
               .first;
    }
    return it->second;
  }

  SymbolVector message_pkt(std::uint64_t msg_rank, int pos) {
    return message_packet(layout_, message(msg_rank), pos);
  }

  std::vector<SymbolVector> materialize(const Transmission& tx) {
    std::vector<SymbolVector> out;
    if (const auto* piece = std::get_if<PieceRef>(&tx.payload)) {
      out.reserve(piece->length);
      for (int p = 0; p < piece->length; ++p)
        out.push_back(message_pkt(piece->msg_rank, piece->offset + p));
    } else if (const auto* group = std::get_if<XorGroupPayload>(&tx.payload)) {
      out.assign(tx.length_pkts, {});
      for (const BucketStream& stream : group->buckets) {
        std::int64_t pos = 0;
        for (const PieceRef& part : stream.parts)
          for (int p = 0; p < part.length; ++p, ++pos)
            out[pos].add(message_pkt(part.msg_rank, part.offset + p), *field_);
      }
    } else if (const auto* rlc = std::get_if<RlcStage2Payload>(&tx.payload)) {
      out = materialize_stage2(*rlc);
    } else {
      throw internal_error("materialize: transmission has no payload descriptor");
    }
    if (static_cast<std::int64_t>(out.size()) != tx.length_pkts)
      throw internal_error("materialize: payload length disagrees with plan record");
    return out;
  }

  std::vector<SymbolVector> materialize_stage2(const RlcStage2Payload& rlc) {
    // Stage 1 first: every L-set is c combinations over its X-set packets.
    std::vector<SymbolVector> l_packets;
    for (const LSetDesc& l : rlc.lsets) {
      std::vector<SymbolVector> x_packets;
      for (const XSetDesc& xs : l.xsets)
        for (const XEntry& e : xs.entries) {
          const CauchyRows rows(*field_, e.row_begin + e.row_count, e.piece.length,
                                detail::piece_salt(plan_->salt, e.piece.msg_rank, e.piece.relay));
          for (int i = 0; i < e.row_count; ++i) {
            SymbolVector x;
            for (int j = 0; j < e.piece.length; ++j)
              x.add_scaled(message_pkt(e.piece.msg_rank, e.piece.offset + j),
                           rows.entry(e.row_begin + i, j), *field_);
            x_packets.push_back(std::move(x));
          }
        }
      const CauchyRows stage1(*field_, static_cast<std::uint32_t>(l.c),
                              static_cast<std::uint32_t>(x_packets.size()),
                              detail::stage1_salt(plan_->salt, rlc.relay, mask_of(l.cover)));
      for (std::int64_t i = 0; i < l.c; ++i) {
        SymbolVector lp;
        for (std::size_t j = 0; j < x_packets.size(); ++j)
          lp.add_scaled(x_packets[j], stage1.entry(static_cast<std::uint32_t>(i),
                                                   static_cast<std::uint32_t>(j)),
                        *field_);
        l_packets.push_back(std::move(lp));
      }
    }
    const CauchyRows stage2(*field_, static_cast<std::uint32_t>(rlc.c_prime),
                            static_cast<std::uint32_t>(l_packets.size()),
                            detail::stage2_salt(plan_->salt, rlc.relay));
    std::vector<SymbolVector> out;
    out.reserve(rlc.c_prime);
    for (std::int64_t i = 0; i < rlc.c_prime; ++i) {
      SymbolVector v;
      for (std::size_t j = 0; j < l_packets.size(); ++j)
        v.add_scaled(l_packets[j], stage2.entry(static_cast<std::uint32_t>(i),
                                                static_cast<std::uint32_t>(j)),
                     *field_);
      out.push_back(std::move(v));
    }
    return out;
  }

  const Topology* topo_;
  const Placement* pl_;
  const DeliveryPlan* plan_;
  const Field* field_;
  BasisLayout layout_;
  std::unordered_map<std::uint64_t, MulticastMessage> messages_;
  std::vector<std::optional<std::vector<SymbolVector>>> cache_;
};

struct UserReport {
  int user = 0;
  bool decoded = false;
  std::vector<Coord> missing;  // first few undecodable packet coordinates
};

struct VerificationReport {
  bool all_decoded = false;
  bool loads_match = false;
  bool invariants_ok = false;
  std::vector<UserReport> users;
  std::map<Link, std::int64_t> measured_pkts;
  Rational measured_max_load;
  std::vector<std::string> errors;

  bool ok() const { return all_decoded && loads_match && invariants_ok; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["ok"] = ok();
    j["all_decoded"] = all_decoded;
    j["loads_match"] = loads_match;
    j["invariants_ok"] = invariants_ok;
    j["measured_max_link_load"] = ratio_string(measured_max_load);
    auto& us = j["users"] = nlohmann::json::array();
    for (const auto& u : users) {
      nlohmann::json ju{{"user", u.user}, {"decoded", u.decoded}};
      if (!u.missing.empty()) ju["missing_coords"] = u.missing;
      us.push_back(std::move(ju));
    }
    auto& loads = j["measured_per_link_pkts"] = nlohmann::json::object();
    for (const auto& [link, pkts] : measured_pkts) loads[link.str()] = pkts;
    j["errors"] = errors;
    return j;
  }
};

// Bit-level oracle: executes the plan over the topology and checks, per user,
// that every packet of the demanded file lies in the span of cache plus
// received symbols. Loads are re-measured from the materialized payloads and
// compared against the plan's declared accounting.
inline VerificationReport simulate(const Topology& topo, const Placement& pl,
                                   const DeliveryPlan& plan,
                                   const SimulationConfig& config) {
  if (plan.transmissions.empty() && !plan.link_pkts.empty())
    throw parameter_error("simulate: plan was compiled without transmission records");
  if (config.packets_per_subfile != plan.packets_per_subfile ||
      !(config.field == plan.field) || config.salt != plan.salt ||
      config.demand.d != plan.demand.d || config.scheme != plan.scheme)
    throw parameter_error("simulate: config disagrees with the compiled plan");
  pl.check_demand(config.demand);

  VerificationReport report;
  report.invariants_ok = true;
  PlanMaterializer mat(topo, pl, plan);
  const Field& field = mat.field();
  const BasisLayout& layout = mat.layout();
  if (plan.required_points > field.order())
    throw config_error("simulate: plan needs " + std::to_string(plan.required_points) +
                       " distinct coefficient points, beyond GF(2^" +
                       std::to_string(plan.field.degree) +
                       "); bit-level verification is unavailable for this cell");

  // holder mask per subfile rank (shared by projection and target listing)
  std::vector<std::uint64_t> holder_mask(pl.subfiles_per_file());
  {
    std::uint64_t rank = 0;
    for_each_subset(pl.num_users(), pl.t(), [&](const Subset& w) {
      holder_mask[rank++] = mask_of(w);
    });
  }
  const auto cached_by = [&](Coord c, int user) {
    const std::uint64_t sf = (c / layout.packets_per_subfile) % layout.subfiles_per_file;
    return (holder_mask[sf] >> (user - 1) & 1) != 0;
  };

  // Link audit: forwards must come from this relay's own server feed and only
  // reach users wired to the relay.
  for (std::size_t i = 0; i < plan.transmissions.size(); ++i) {
    const Transmission& tx = plan.transmissions[i];
    report.measured_pkts[tx.link] += tx.length_pkts;
    if (tx.link.type == Link::Type::relay_to_user) {
      const auto* fwd = std::get_if<ForwardPayload>(&tx.payload);
      if (!fwd) {
        report.invariants_ok = false;
        report.errors.push_back("relay->user transmission without forward payload: " + tx.tag);
        continue;
      }
      if (!topo.connected(tx.link.relay, tx.link.user)) {
        report.invariants_ok = false;
        report.errors.push_back("forward to user not wired to relay: " + tx.link.str());
      }
      if (fwd->source_index >= i ||
          plan.transmissions[fwd->source_index].link.type != Link::Type::server_to_relay ||
          plan.transmissions[fwd->source_index].link.relay != tx.link.relay ||
          plan.transmissions[fwd->source_index].length_pkts != tx.length_pkts) {
        report.invariants_ok = false;
        report.errors.push_back("forward does not copy an earlier server transmission to relay " +
                                std::to_string(tx.link.relay) + ": " + tx.tag);
      }
    }
  }

  // Measured payload sizes must match the declared packet counts.
  report.loads_match = true;
  for (std::size_t i = 0; i < plan.transmissions.size(); ++i) {
    const Transmission& tx = plan.transmissions[i];
    if (tx.link.type != Link::Type::server_to_relay) continue;
    if (static_cast<std::int64_t>(mat.packets(i).size()) != tx.length_pkts) {
      report.loads_match = false;
      report.errors.push_back("payload length mismatch: " + tx.tag);
    }
  }
  for (const auto& [link, pkts] : report.measured_pkts) {
    auto it = plan.link_pkts.find(link);
    if (it == plan.link_pkts.end() || it->second != pkts) {
      report.loads_match = false;
      report.errors.push_back("per-link load mismatch on " + link.str());
    }
  }
  for (const auto& [link, pkts] : plan.link_pkts) {
    if (!report.measured_pkts.count(link) && pkts != 0) {
      report.loads_match = false;
      report.errors.push_back("declared load on absent link " + link.str());
    }
  }
  {
    std::int64_t best = 0;
    for (const auto& [link, pkts] : report.measured_pkts) best = std::max(best, pkts);
    report.measured_max_load = Rational(BigInt(best), BigInt(plan.file_packets));
  }

  // Per-user decodability.
  report.all_decoded = true;
  for (int user = 1; user <= topo.num_users(); ++user) {
    SpanBasis basis(field, layout.dimension());
    for (std::size_t i = 0; i < plan.transmissions.size(); ++i) {
      const Transmission& tx = plan.transmissions[i];
      if (tx.link.type != Link::Type::relay_to_user || tx.link.user != user) continue;
      if (const auto* fwd = std::get_if<ForwardPayload>(&tx.payload);
          fwd && fwd->source_index >= plan.transmissions.size())
        continue;  // dangling forward, already flagged by the link audit
      for (const SymbolVector& v : mat.packets(i)) {
        SymbolVector projected;
        for (const auto& [coord, coeff] : v.terms())
          if (!cached_by(coord, user)) projected.add_term(coord, coeff);
        if (!projected.empty()) basis.insert(std::move(projected));
      }
    }
    UserReport ur;
    ur.user = user;
    ur.decoded = true;
    const int wanted_file = config.demand.d[user - 1];
    for (std::uint64_t w = 0; w < pl.subfiles_per_file(); ++w) {
      if (holder_mask[w] >> (user - 1) & 1) continue;  // cached subfile
      for (int p = 0; p < layout.packets_per_subfile; ++p) {
        const Coord c = layout.coord({wanted_file, w}, p);
        if (!basis.contains(SymbolVector::unit(c))) {
          ur.decoded = false;
          if (ur.missing.size() < 8) ur.missing.push_back(c);
        }
      }
    }
    if (!ur.decoded) {
      report.all_decoded = false;
      report.errors.push_back("user " + std::to_string(user) + " cannot decode file " +
                              std::to_string(wanted_file) + " (" +
                              std::to_string(ur.missing.size()) + "+ packets missing)");
    }
    report.users.push_back(std::move(ur));
  }
  return report;
}

inline VerificationReport simulate(const Topology& topo, const Placement& pl,
                                   const DeliveryPlan& plan) {
  return simulate(topo, pl, plan, SimulationConfig::for_plan(plan));
}

// Rough operation count for simulating a plan; used to keep grid sweeps away
// from cells whose bit-level check would not finish in reasonable time.
inline std::uint64_t simulation_cost_estimate(const DeliveryPlan& plan) {
  const std::uint64_t per_pkt_coords = plan.t + 1;
  std::uint64_t total = 0;
  for (const Transmission& tx : plan.transmissions) {
    if (tx.link.type != Link::Type::server_to_relay) {
      total += static_cast<std::uint64_t>(tx.length_pkts) * per_pkt_coords;  // insert cost
      continue;
    }
    if (std::holds_alternative<PieceRef>(tx.payload)) {
      total += static_cast<std::uint64_t>(tx.length_pkts) * per_pkt_coords;
    } else if (const auto* group = std::get_if<XorGroupPayload>(&tx.payload)) {
      for (const BucketStream& b : group->buckets)
        total += static_cast<std::uint64_t>(b.length()) * per_pkt_coords;
    } else if (const auto* rlc = std::get_if<RlcStage2Payload>(&tx.payload)) {
      std::uint64_t l_support = 0;  // total support of all L packets
      for (const LSetDesc& l : rlc->lsets) {
        std::uint64_t piece_support = 0;
        for (const XSetDesc& xs : l.xsets)
          for (const XEntry& e : xs.entries)
            piece_support += static_cast<std::uint64_t>(e.piece.length) * per_pkt_coords;
        l_support += static_cast<std::uint64_t>(l.c) * piece_support;
      }
      total += static_cast<std::uint64_t>(rlc->c_prime) * std::max<std::uint64_t>(l_support, 1);
    }
  }
  // every relay->user copy is eliminated per receiving user
  std::uint64_t fwd = 0;
  for (const Transmission& tx : plan.transmissions)
    if (tx.link.type == Link::Type::relay_to_user)
      fwd += static_cast<std::uint64_t>(tx.length_pkts) * per_pkt_coords;
  return total + fwd;
}

// Removes the n-th server->relay transmission (0-based) together with its
// forwarded copies, reindexing the remaining forwards.
inline DeliveryPlan without_server_transmission(const DeliveryPlan& plan, std::size_t ordinal) {
  std::size_t victim = plan.transmissions.size();
  std::size_t seen = 0;
  for (std::size_t i = 0; i < plan.transmissions.size(); ++i) {
    if (plan.transmissions[i].link.type != Link::Type::server_to_relay) continue;
    if (seen++ == ordinal) {
      victim = i;
      break;
    }
  }
  if (victim == plan.transmissions.size())
    throw parameter_error("without_server_transmission: ordinal out of range");

  DeliveryPlan out = plan;
  out.transmissions.clear();
  out.link_pkts.clear();
  std::vector<std::size_t> remap(plan.transmissions.size(), SIZE_MAX);
  for (std::size_t i = 0; i < plan.transmissions.size(); ++i) {
    if (i == victim) continue;
    if (const auto* fwd = std::get_if<ForwardPayload>(&plan.transmissions[i].payload))
      if (fwd->source_index == victim) continue;
    Transmission tx = plan.transmissions[i];
    if (auto* fwd = std::get_if<ForwardPayload>(&tx.payload)) {
      if (remap[fwd->source_index] == SIZE_MAX)
        throw internal_error("without_server_transmission: forward precedes its source");
      fwd->source_index = remap[fwd->source_index];
    }
    remap[i] = out.transmissions.size();
    out.transmissions.push_back(std::move(tx));
    out.account(out.transmissions.back().link, out.transmissions.back().length_pkts);
  }
  return out;
}

inline std::size_t count_server_transmissions(const DeliveryPlan& plan) {
  std::size_t n = 0;
  for (const auto& tx : plan.transmissions)
    if (tx.link.type == Link::Type::server_to_relay) ++n;
  return n;
}

struct GridOptions {
  int h_max = 6;
  int r_max = 3;
  bool require_r_less_h = false;         // restrict to r < H
  bool run_base = true;
  bool run_improved = true;
  std::uint64_t sim_budget = 200'000'000;  // cost-estimate units; 0 = plans only
  std::uint64_t salt = 0;
};

struct GridRow {
  int H = 0, r = 0, t = 0;
  Scheme scheme = Scheme::base;
  Rational max_load;
  Rational formula_load;       // closed-form value (base rows)
  bool formula_match = true;   // base rows only
  bool balanced = true;        // equal server->relay loads
  bool dominated = true;       // improved rows: load <= base load at same cell
  std::uint64_t cost_estimate = 0;
  bool simulated = false;
  bool decoded = true;         // meaningful when simulated
  std::string note;

  bool ok() const { return formula_match && balanced && dominated && (!simulated || decoded); }
};

struct GridSummary {
  std::vector<GridRow> rows;
  int failures = 0;
  int simulated_cells = 0;
  int skipped_cells = 0;

  std::string csv() const {
    std::ostringstream os;
    os << "H,r,t,scheme,max_load,formula,formula_match,balanced,dominated,simulated,decoded,"
          "note\n";
    for (const auto& row : rows) {
      os << row.H << ',' << row.r << ',' << row.t << ',' << scheme_name(row.scheme) << ','
         << ratio_string(row.max_load) << ',' << ratio_string(row.formula_load) << ','
         << row.formula_match << ',' << row.balanced << ',' << row.dominated << ','
         << row.simulated << ',' << row.decoded << ',' << row.note << '\n';
    }
    return os.str();
  }
};

inline bool relay_loads_balanced(const DeliveryPlan& plan) {
  const Rational first = plan.server_relay_load(1);
  for (int h = 2; h <= plan.num_relays; ++h)
    if (plan.server_relay_load(h) != first) return false;
  return true;
}

// Sweeps (H, r, t) cells with distinct demands (N = K): checks plan-formula
// agreement and relay balance on every cell and runs the bit-level oracle on
// cells whose estimated cost fits the budget.
template <typename CellFn>
void for_each_grid_cell(const GridOptions& opt, CellFn&& fn) {
  for (int H = 2; H <= opt.h_max; ++H)
    for (int r = 1; r <= std::min(opt.r_max, opt.require_r_less_h ? H - 1 : H); ++r)
      fn(H, r);
}

inline GridSummary exhaustive_check(const GridOptions& opt) {
  GridSummary summary;
  for_each_grid_cell(opt, [&](int H, int r) {
    const Topology topo(H, r);
    const int K = topo.num_users();
    if (K > 64) return;
    const DemandVector demand = worst_case_demand(K, K);
    for (int t = 0; t <= K; ++t) {
      const Placement pl = uncoded_placement(topo, K, t);
      const Rational formula = closed_form_load(topo, t);
      Rational base_load;
      for (int pass = 0; pass < 2; ++pass) {
        const Scheme scheme = pass == 0 ? Scheme::base : Scheme::improved;
        if ((scheme == Scheme::base && !opt.run_base) ||
            (scheme == Scheme::improved && !opt.run_improved))
          continue;
        PlanOptions popt;
        popt.salt = opt.salt;
        DeliveryPlan plan = scheme == Scheme::base
                                ? compile_base_plan(topo, pl, demand, popt)
                                : compile_improved_plan_auto(topo, pl, demand, popt);
        GridRow row;
        row.H = H;
        row.r = r;
        row.t = t;
        row.scheme = scheme;
        row.max_load = plan.max_link_load();
        row.formula_load = formula;
        row.balanced = relay_loads_balanced(plan);
        if (scheme == Scheme::base) {
          base_load = row.max_load;
          row.formula_match = row.max_load == formula;
        } else if (opt.run_base) {
          row.dominated = row.max_load <= base_load;
        }
        row.cost_estimate = simulation_cost_estimate(plan);
        const bool field_fits = plan.required_points <= field_for(plan.field).order();
        if (opt.sim_budget > 0 && row.cost_estimate <= opt.sim_budget && field_fits) {
          VerificationReport rep = simulate(topo, pl, plan);
          row.simulated = true;
          row.decoded = rep.ok();
          if (!rep.ok() && !rep.errors.empty()) row.note = rep.errors.front();
          ++summary.simulated_cells;
        } else {
          row.note = field_fits ? "sim skipped (cost estimate over budget)"
                                : "sim skipped (needs more points than GF(2^16) offers)";
          ++summary.skipped_cells;
        }
        if (!row.ok()) ++summary.failures;
        summary.rows.push_back(std::move(row));
      }
    }
  });
  return summary;
}

}  // namespace combnet
