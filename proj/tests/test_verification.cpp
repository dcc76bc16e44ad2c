#include <catch_amalgamated.hpp>

#include "combnet/plan_io.hpp"
#include "combnet/verification.hpp"

using namespace combnet;

namespace {

struct Cell {
  Topology topo;
  Placement pl;
  DemandVector d;
  Cell(int H, int r, int N, int t)
      : topo(H, r), pl(uncoded_placement(topo, N, t)), d(worst_case_demand(topo.num_users(), N)) {}
};

}  // namespace

TEST_CASE("bit-level oracle on the worked base example") {
  Cell cell(4, 2, 6, 2);
  const DeliveryPlan plan = compile_base_plan(cell.topo, cell.pl, cell.d);
  const VerificationReport rep = simulate(cell.topo, cell.pl, plan);
  CHECK(rep.ok());
  CHECK(rep.all_decoded);
  CHECK(rep.loads_match);
  CHECK(rep.invariants_ok);
  CHECK(rep.measured_max_load == make_ratio(7, 15));
  for (const auto& u : rep.users) CHECK(u.decoded);

  const nlohmann::json j = rep.to_json();
  CHECK(j["ok"] == true);
  CHECK(j["measured_max_link_load"] == "7/15");
}

TEST_CASE("bit-level oracle on the worked improved example") {
  Cell cell(4, 2, 6, 3);
  const DeliveryPlan plan = compile_improved_plan(cell.topo, cell.pl, cell.d);
  const VerificationReport rep = simulate(cell.topo, cell.pl, plan);
  CHECK(rep.ok());
  CHECK(rep.measured_max_load == make_ratio(47, 160));
}

TEST_CASE("full caching needs no transmissions") {
  Cell cell(4, 2, 6, 6);
  const DeliveryPlan plan = compile_base_plan(cell.topo, cell.pl, cell.d);
  const VerificationReport rep = simulate(cell.topo, cell.pl, plan);
  CHECK(rep.ok());
  CHECK(rep.measured_max_load == Rational(0));
}

TEST_CASE("repeated demands still decode") {
  Cell cell(4, 2, 3, 2);  // N=3 < K=6
  for (const Scheme scheme : {Scheme::base, Scheme::improved}) {
    const DeliveryPlan plan = compile_plan(scheme, cell.topo, cell.pl, cell.d);
    const VerificationReport rep = simulate(cell.topo, cell.pl, plan);
    CAPTURE(scheme_name(scheme));
    CHECK(rep.ok());
  }
}

TEST_CASE("deleting a server transmission breaks decoding") {
  Cell cell(4, 2, 6, 2);
  const DeliveryPlan plan = compile_base_plan(cell.topo, cell.pl, cell.d);
  const std::size_t count = count_server_transmissions(plan);
  REQUIRE(count == 4 * (10 + 3));
  for (std::size_t ordinal : {std::size_t{0}, count / 2, count - 1}) {
    const DeliveryPlan tampered = without_server_transmission(plan, ordinal);
    const VerificationReport rep = simulate(cell.topo, cell.pl, tampered);
    CAPTURE(ordinal);
    CHECK_FALSE(rep.all_decoded);
    bool named = false;
    for (const auto& u : rep.users)
      if (!u.decoded && !u.missing.empty()) named = true;
    CHECK(named);
  }
  CHECK_THROWS_AS(without_server_transmission(plan, count), parameter_error);
}

TEST_CASE("plan files restrict the reference construction") {
  Cell cell(4, 2, 6, 2);
  const DeliveryPlan plan = compile_base_plan(cell.topo, cell.pl, cell.d);
  const nlohmann::json j = plan.to_json();
  const PlanFile file = parse_plan_file(j);
  CHECK(file.records.size() == plan.transmissions.size());

  SECTION("full file reproduces the plan") {
    const DeliveryPlan rebuilt = restrict_to_records(plan, file.records);
    CHECK(rebuilt.link_pkts == plan.link_pkts);
    CHECK(simulate(cell.topo, cell.pl, rebuilt).ok());
  }

  SECTION("dropping one forward leaves a user undecodable") {
    // phase-1 W_{1,2,3} piece exists only at relay 1; cut its copy to user 1
    std::vector<PlanRecord> records = file.records;
    const auto it = std::find_if(records.begin(), records.end(), [](const PlanRecord& r) {
      return r.link == Link::to_user(1, 1) && r.tag.find("J={1,2,3}") != std::string::npos;
    });
    REQUIRE(it != records.end());
    records.erase(it);
    const DeliveryPlan rebuilt = restrict_to_records(plan, records);
    const VerificationReport rep = simulate(cell.topo, cell.pl, rebuilt);
    CHECK_FALSE(rep.all_decoded);
    CHECK_FALSE(rep.users[0].decoded);
  }

  SECTION("dangling forwards are a conservation failure") {
    std::vector<PlanRecord> records = file.records;
    const auto it =
        std::find_if(records.begin(), records.end(), [](const PlanRecord& r) {
          return r.link.type == Link::Type::server_to_relay &&
                 r.tag.find("J={1,2,3}") != std::string::npos;
        });
    REQUIRE(it != records.end());
    records.erase(it);
    const DeliveryPlan rebuilt = restrict_to_records(plan, records);
    const VerificationReport rep = simulate(cell.topo, cell.pl, rebuilt);
    CHECK_FALSE(rep.invariants_ok);
    CHECK_FALSE(rep.ok());
  }

  SECTION("unknown records are reported") {
    std::vector<PlanRecord> records = file.records;
    records.push_back({1, Link::to_relay(1), "made up", 4});
    std::vector<std::string> warnings;
    restrict_to_records(plan, records, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings.front().find("made up") != std::string::npos);
  }
}

TEST_CASE("materialized piece values match the content generator") {
  Cell cell(4, 2, 6, 2);
  const DeliveryPlan plan = compile_base_plan(cell.topo, cell.pl, cell.d);
  PlanMaterializer mat(cell.topo, cell.pl, plan);
  const Field& f = mat.field();

  // first transmission: piece of W_{1,2,3} = F_{1,{2,3}} + F_{2,{1,3}} + F_{3,{1,2}}
  const auto& packets = mat.packets(0);
  REQUIRE(packets.size() == 24);
  const BasisLayout& layout = mat.layout();
  const std::uint64_t salt = 99;
  const Field::Elem direct = Field::add(
      Field::add(packet_value(f, salt, layout.coord({1, rank_subset({2, 3}, 6)}, 0)),
                 packet_value(f, salt, layout.coord({2, rank_subset({1, 3}, 6)}, 0))),
      packet_value(f, salt, layout.coord({3, rank_subset({1, 2}, 6)}, 0)));
  CHECK(evaluate_symbol(f, packets[0], salt) == direct);

  // forwarded copies carry the very same payload
  const auto& fwd = plan.transmissions[1];
  REQUIRE(fwd.link.type == Link::Type::relay_to_user);
  CHECK(&mat.packets(1) == &mat.packets(0));
}

TEST_CASE("grid harness at desk scale") {
  GridOptions opt;
  opt.h_max = 4;
  opt.r_max = 3;
  const GridSummary summary = exhaustive_check(opt);
  CHECK(summary.failures == 0);
  CHECK(summary.skipped_cells == 0);
  CHECK(summary.simulated_cells > 0);
  for (const auto& row : summary.rows) {
    CAPTURE(row.H, row.r, row.t, scheme_name(row.scheme));
    CHECK(row.ok());
    CHECK(row.simulated);
  }
  const std::string csv = summary.csv();
  CHECK(csv.find("H,r,t,scheme") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(summary.rows.size()) + 1);
}

TEST_CASE("simulation cost estimate is positive and monotone-ish") {
  Cell small(4, 2, 6, 1);
  Cell big(4, 2, 6, 3);
  const auto cost_small =
      simulation_cost_estimate(compile_base_plan(small.topo, small.pl, small.d));
  const auto cost_big = simulation_cost_estimate(compile_base_plan(big.topo, big.pl, big.d));
  CHECK(cost_small > 0);
  CHECK(cost_big > cost_small);
}

TEST_CASE("simulate rejects mismatched configs and loads-only plans") {
  Cell cell(4, 2, 6, 2);
  const DeliveryPlan plan = compile_base_plan(cell.topo, cell.pl, cell.d);
  SimulationConfig cfg = SimulationConfig::for_plan(plan);
  cfg.salt ^= 1;
  CHECK_THROWS_AS(simulate(cell.topo, cell.pl, plan, cfg), parameter_error);

  PlanOptions lean;
  lean.keep_transmissions = false;
  const DeliveryPlan thin = compile_base_plan(cell.topo, cell.pl, cell.d, lean);
  CHECK_THROWS_AS(simulate(cell.topo, cell.pl, thin), parameter_error);
}
