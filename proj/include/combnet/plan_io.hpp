#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "combnet/delivery_improved.hpp"
#include "combnet/plan.hpp"

namespace combnet {

// The transmission identity used when validating an external plan file:
// payloads are not serialized, so records are matched back to the
// deterministic reference construction by these four fields.
struct PlanRecord {
  int phase = 0;
  Link link;
  std::string tag;
  std::int64_t length_pkts = 0;

  auto key() const { return std::tie(phase, link, tag, length_pkts); }
};

struct PlanFile {
  Scheme scheme = Scheme::base;
  int relays = 0;
  int degree = 0;
  int files = 0;
  int t = 0;
  std::uint64_t salt = 0;
  FieldSpec field;
  DemandVector demand;
  std::vector<PlanRecord> records;
};

inline PlanFile parse_plan_file(const nlohmann::json& j) {
  PlanFile f;
  const std::string scheme = j.at("scheme").get<std::string>();
  if (scheme == "base") f.scheme = Scheme::base;
  else if (scheme == "improved") f.scheme = Scheme::improved;
  else throw parameter_error("plan file: unknown scheme '" + scheme + "'");
  f.relays = j.at("relays").get<int>();
  f.degree = j.at("degree").get<int>();
  f.files = j.at("files").get<int>();
  f.t = j.at("t").get<int>();
  f.salt = j.value("salt", std::uint64_t{0});
  f.field = FieldSpec::for_degree(j.value("field_degree", 8));
  f.demand.d = j.at("demand").get<std::vector<int>>();
  for (const auto& tx : j.at("transmissions")) {
    PlanRecord rec;
    rec.phase = tx.at("phase").get<int>();
    const auto& link = tx.at("link");
    const std::string type = link.at("type").get<std::string>();
    if (type == "server_to_relay")
      rec.link = Link::to_relay(link.at("relay").get<int>());
    else if (type == "relay_to_user")
      rec.link = Link::to_user(link.at("relay").get<int>(), link.at("user").get<int>());
    else
      throw parameter_error("plan file: unknown link type '" + type + "'");
    rec.tag = tx.at("tag").get<std::string>();
    rec.length_pkts = tx.at("length_pkts").get<std::int64_t>();
    f.records.push_back(std::move(rec));
  }
  return f;
}

// Rebuilds an executable plan from a plan file: the reference plan is
// recompiled deterministically and restricted to the transmissions the file
// lists. Forwards whose server-side source was removed stay in as dangling
// records, which the simulator reports as a conservation failure.
inline DeliveryPlan restrict_to_records(const DeliveryPlan& reference,
                                        const std::vector<PlanRecord>& records,
                                        std::vector<std::string>* warnings = nullptr) {
  std::map<std::tuple<int, Link, std::string, std::int64_t>, int> wanted;
  for (const auto& rec : records) ++wanted[rec.key()];

  DeliveryPlan out = reference;
  out.transmissions.clear();
  out.link_pkts.clear();
  std::vector<std::size_t> remap(reference.transmissions.size(), SIZE_MAX);
  for (std::size_t i = 0; i < reference.transmissions.size(); ++i) {
    const Transmission& tx = reference.transmissions[i];
    auto it = wanted.find(std::tie(tx.phase, tx.link, tx.tag, tx.length_pkts));
    if (it == wanted.end() || it->second == 0) continue;
    --it->second;
    Transmission copy = tx;
    if (auto* fwd = std::get_if<ForwardPayload>(&copy.payload))
      fwd->source_index = remap[fwd->source_index];  // may stay SIZE_MAX (dangling)
    remap[i] = out.transmissions.size();
    out.transmissions.push_back(std::move(copy));
    out.account(out.transmissions.back().link, out.transmissions.back().length_pkts);
  }
  if (warnings) {
    for (const auto& [key, count] : wanted)
      if (count > 0)
        warnings->push_back("plan file lists " + std::to_string(count) +
                            " transmission(s) the reference construction does not produce (tag '" +
                            std::get<2>(key) + "')");
  }
  return out;
}

}  // namespace combnet
