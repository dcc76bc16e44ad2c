#include <catch_amalgamated.hpp>

#include "combnet/analysis.hpp"
#include "combnet/delivery_base.hpp"

using namespace combnet;

TEST_CASE("relay selection") {
  const Topology topo(4, 2);
  CHECK(select_relays(topo, {1, 2, 3}) == Subset{1});
  CHECK(select_relays(topo, {1, 2, 4}) == Subset{1, 2, 3});
  CHECK(select_relays(topo, {1, 2, 5, 6}) == Subset{1, 2, 3, 4});
  CHECK(select_relays(topo, {4}) == Subset{2, 3});  // S_{{k}} = H_k
  CHECK_THROWS_AS(select_relays(topo, {}), parameter_error);
}

TEST_CASE("q-sets") {
  const Topology topo(4, 2);
  CHECK(q_set(topo, 4, 1, 2) == Subset{1});
  CHECK(q_set(topo, 4, 1, 3) == Subset{2});
  CHECK_THROWS_AS(q_set(topo, 4, 1, 4), parameter_error);  // 4 not a relay of user 4
  CHECK_THROWS_AS(q_set(topo, 1, 1, 2), parameter_error);  // user 1 is connected to h

  SECTION("cardinality r-1 for every valid triple on (5,3)") {
    const Topology big(5, 3);
    for (int k = 1; k <= big.num_users(); ++k) {
      const std::uint32_t hk = big.relay_mask_of_user(k);
      for (int h = 1; h <= 5; ++h) {
        if (hk >> (h - 1) & 1) continue;
        for (int hp = 1; hp <= 5; ++hp) {
          if (!(hk >> (hp - 1) & 1)) continue;
          CHECK(q_set(big, k, h, hp).size() == 2);
        }
      }
    }
  }
}

namespace {

DeliveryPlan example1_plan() {
  const Topology topo(4, 2);
  const Placement pl = uncoded_placement(topo, 6, 2);
  return compile_base_plan(topo, pl, worst_case_demand(6, 6));
}

}  // namespace

TEST_CASE("worked example: H=4, r=2, t=2") {
  const DeliveryPlan plan = example1_plan();
  CHECK(plan.packets_per_subfile == 24);
  CHECK(plan.file_packets == 360);

  SECTION("per-relay loads split 1/3 + 2/15 = 7/15") {
    // phase 2 is three XOR groups of 2B/45 each, 2B/15 in total per relay
    for (int h = 1; h <= 4; ++h) {
      CHECK(plan.phase_load(h, 1) == make_ratio(1, 3));
      CHECK(plan.phase_load(h, 2) == make_ratio(2, 15));
      CHECK(plan.server_relay_load(h) == make_ratio(7, 15));
    }
    CHECK(plan.max_link_load() == make_ratio(7, 15));
  }

  SECTION("relay 1 receives the expected piece lengths") {
    // one whole message, six halves, three thirds
    std::map<std::int64_t, int> hist;
    for (const auto& tx : plan.transmissions)
      if (tx.phase == 1 && tx.link == Link::to_relay(1)) ++hist[tx.length_pkts];
    CHECK(hist == std::map<std::int64_t, int>{{24, 1}, {12, 6}, {8, 3}});
  }

  SECTION("phase-2 groups at relay 1 match the worked bucket lists") {
    std::vector<const XorGroupPayload*> groups;
    for (const auto& tx : plan.transmissions)
      if (tx.phase == 2 && tx.link == Link::to_relay(1)) {
        CHECK(tx.length_pkts == 16);  // 2B/45
        groups.push_back(&std::get<XorGroupPayload>(tx.payload));
      }
    REQUIRE(groups.size() == 3);
    CHECK(groups[0]->cover == Subset{1, 2});
    CHECK(groups[1]->cover == Subset{1, 3});
    CHECK(groups[2]->cover == Subset{2, 3});

    const auto part_ids = [](const BucketStream& b) {
      std::vector<std::pair<std::uint64_t, int>> ids;
      for (const auto& p : b.parts) ids.emplace_back(p.msg_rank, p.relay);
      return ids;
    };
    const auto rank = [](std::initializer_list<int> j) { return rank_subset(Subset(j), 6); };

    // P^1_{1,{2}} and P^1_{2,{1}}
    const XorGroupPayload& g = *groups[0];
    REQUIRE(g.buckets.size() == 2);
    CHECK(g.buckets[0].user == 1);
    CHECK(g.buckets[0].q == Subset{2});
    CHECK(part_ids(g.buckets[0]) ==
          std::vector<std::pair<std::uint64_t, int>>{
              {rank({1, 2, 4}), 3}, {rank({1, 2, 6}), 3}, {rank({1, 4, 6}), 3}});
    CHECK(g.buckets[1].user == 2);
    CHECK(g.buckets[1].q == Subset{1});
    CHECK(part_ids(g.buckets[1]) ==
          std::vector<std::pair<std::uint64_t, int>>{
              {rank({1, 2, 4}), 2}, {rank({1, 2, 5}), 2}, {rank({2, 4, 5}), 2}});

    // lengths 4 + 6 + 6 on both sides of the XOR
    for (const auto& b : g.buckets) {
      CHECK(b.parts[0].length == 4);
      CHECK(b.parts[1].length == 6);
      CHECK(b.parts[2].length == 6);
    }

    // six buckets in total, each 16 packets = 2B/45
    for (const auto* grp : groups) {
      REQUIRE(grp->buckets.size() == 2);
      for (const auto& b : grp->buckets) CHECK(b.length() == 16);
    }
  }

  SECTION("every group covers exactly r users") {
    for (const auto& tx : plan.transmissions)
      if (tx.phase == 2 && tx.link.type == Link::Type::server_to_relay) {
        const auto& g = std::get<XorGroupPayload>(tx.payload);
        CHECK(g.cover.size() == 2);
        CHECK(g.buckets.size() <= 2);
        for (const auto& b : g.buckets) CHECK(b.q.size() == 1);
      }
  }

  SECTION("relay-to-user load never exceeds the server feed") {
    const Topology topo(4, 2);
    for (int h = 1; h <= 4; ++h)
      for (int k : topo.relay_users(h))
        CHECK(plan.link_load(Link::to_user(h, k)) <= plan.server_relay_load(h));
  }
}

TEST_CASE("plan loads match the closed form across a small grid") {
  for (auto [H, r] : {std::pair{3, 2}, {4, 2}, {4, 3}, {5, 2}, {5, 3}}) {
    const Topology topo(H, r);
    const int K = topo.num_users();
    PlanOptions opt;
    opt.keep_transmissions = false;
    for (int t = 0; t <= K; ++t) {
      const DeliveryPlan plan =
          compile_base_plan(topo, uncoded_placement(topo, K, t), worst_case_demand(K, K), opt);
      CAPTURE(H, r, t);
      CHECK(plan.max_link_load() == closed_form_load(topo, t));
      for (int h = 1; h <= H; ++h)
        CHECK(plan.server_relay_load(h) == plan.server_relay_load(1));
    }
  }
}

TEST_CASE("degenerate parameter corners") {
  SECTION("t=0 on (3,3): the single file is split across all three relays") {
    const Topology topo(3, 3);
    const DeliveryPlan plan =
        compile_base_plan(topo, uncoded_placement(topo, 1, 0), worst_case_demand(1, 1));
    CHECK(plan.max_link_load() == make_ratio(1, 3));
    for (const auto& tx : plan.transmissions) CHECK(tx.phase == 1);
  }

  SECTION("t=K: nothing to send") {
    const Topology topo(4, 2);
    const DeliveryPlan plan =
        compile_base_plan(topo, uncoded_placement(topo, 6, 6), worst_case_demand(6, 6));
    CHECK(plan.transmissions.empty());
    CHECK(plan.max_link_load() == Rational(0));
  }

  SECTION("t=1 on (4,2)") {
    const Topology topo(4, 2);
    const DeliveryPlan plan =
        compile_base_plan(topo, uncoded_placement(topo, 6, 1), worst_case_demand(6, 6));
    CHECK(plan.max_link_load() == make_ratio(11, 16));
    CHECK(plan.max_link_load() == closed_form_load(topo, 1));
  }
}

TEST_CASE("loads-only mode agrees with full compilation") {
  const Topology topo(4, 2);
  const Placement pl = uncoded_placement(topo, 6, 2);
  const DemandVector d = worst_case_demand(6, 6);
  PlanOptions lean;
  lean.keep_transmissions = false;
  const DeliveryPlan full = compile_base_plan(topo, pl, d);
  const DeliveryPlan thin = compile_base_plan(topo, pl, d, lean);
  CHECK(thin.transmissions.empty());
  CHECK(full.link_pkts == thin.link_pkts);
}

TEST_CASE("plan structure is independent of the demand vector") {
  const Topology topo(4, 2);
  const Placement pl = uncoded_placement(topo, 3, 2);  // N < K: repeated demands
  const DeliveryPlan a = compile_base_plan(topo, pl, worst_case_demand(6, 3));
  const DeliveryPlan b = compile_base_plan(topo, pl, DemandVector{{3, 3, 3, 3, 3, 3}});
  CHECK(a.link_pkts == b.link_pkts);
  CHECK(a.max_link_load() == closed_form_load(topo, 2));
}

TEST_CASE("plan JSON carries the contract fields") {
  const nlohmann::json j = example1_plan().to_json();
  CHECK(j["max_link_load"] == "7/15");
  CHECK(j["scheme"] == "base");
  const auto& tx = j["transmissions"].front();
  CHECK(tx.contains("phase"));
  CHECK(tx.contains("tag"));
  CHECK(tx.contains("length_pkts"));
  CHECK(tx["link"].contains("type"));
  CHECK(tx["link"].contains("relay"));
  CHECK(j["per_link_load"]["server->relay1"] == "7/15");
}
