// Command-line front end: compile delivery plans, verify them bit-level,
// sweep memory/load tradeoff curves and print bound chains.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "combnet/combnet.hpp"

namespace {

using namespace combnet;

struct TopologyArgs {
  int relays = 0;
  int degree = 0;
  int files = 0;
  std::string demand = "worst";
  std::uint64_t salt = 0;
  std::string field = "auto";

  void attach(CLI::App* cmd, bool with_demand = true) {
    cmd->add_option("--relays", relays, "Number of relays H")->required();
    cmd->add_option("--degree", degree, "Relays per user r")->required();
    cmd->add_option("--files", files, "Number of files N")->required();
    cmd->add_option("--salt", salt, "Seed for the deterministic coefficients (default 0)");
    if (with_demand) {
      cmd->add_option("--demand", demand,
                      "worst (default) or an explicit comma-separated demand vector");
      cmd->add_option("--field", field, "Field degree: auto (default), 8 or 16");
    }
  }

  Topology topology() const { return Topology(relays, degree); }

  DemandVector demand_vector(int num_users) const {
    if (demand == "worst") return worst_case_demand(num_users, files);
    DemandVector dv;
    std::stringstream ss(demand);
    std::string item;
    while (std::getline(ss, item, ',')) dv.d.push_back(std::stoi(item));
    return dv;
  }
};

Scheme parse_scheme(const std::string& name) {
  if (name == "base") return Scheme::base;
  if (name == "improved") return Scheme::improved;
  throw parameter_error("unknown scheme '" + name + "' (expected base or improved)");
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(BigInt(text));
  return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw parameter_error("cannot open output file '" + path + "'");
  os << content;
}

DeliveryPlan compile_for(const TopologyArgs& args, int t, Scheme scheme, bool keep) {
  const Topology topo = args.topology();
  const Placement pl = uncoded_placement(topo, args.files, t);
  const DemandVector dv = args.demand_vector(topo.num_users());
  PlanOptions opt;
  opt.keep_transmissions = keep;
  opt.salt = args.salt;
  if (scheme == Scheme::base) {
    if (args.field != "auto") opt.field = FieldSpec::for_degree(std::stoi(args.field));
    return compile_base_plan(topo, pl, dv, opt);
  }
  if (args.field == "auto") return compile_improved_plan_auto(topo, pl, dv, opt);
  opt.field = FieldSpec::for_degree(std::stoi(args.field));
  return compile_improved_plan(topo, pl, dv, opt);
}

int run_plan(const TopologyArgs& args, int t, const std::string& scheme_name,
             const std::string& output) {
  const DeliveryPlan plan = compile_for(args, t, parse_scheme(scheme_name), true);
  write_output(output, plan.to_json().dump(2) + "\n");
  const Rational load = plan.max_link_load();
  std::cerr << "plan: scheme=" << scheme_name << " H=" << args.relays << " r=" << args.degree
            << " N=" << args.files << " t=" << t << " max_link_load=" << ratio_string(load)
            << " (" << ratio_double(load) << ")\n";
  return 0;
}

int report_verification(const VerificationReport& rep) {
  for (const auto& err : rep.errors) std::cerr << "verify: " << err << "\n";
  std::cerr << "verify: " << (rep.ok() ? "PASS" : "FAIL")
            << " max_link_load=" << ratio_string(rep.measured_max_load) << " decoded="
            << rep.all_decoded << " loads_match=" << rep.loads_match
            << " invariants=" << rep.invariants_ok << "\n";
  return rep.ok() ? 0 : 1;
}

int run_verify_cell(const TopologyArgs& args, int t, const std::string& scheme_name,
                    const std::string& report_path) {
  const Topology topo = args.topology();
  const Placement pl = uncoded_placement(topo, args.files, t);
  const DeliveryPlan plan = compile_for(args, t, parse_scheme(scheme_name), true);
  if (const auto cost = simulation_cost_estimate(plan); cost > 1'000'000'000)
    std::cerr << "verify: cost estimate " << cost
              << " units; bit-level verification of this cell may take very long\n";
  const VerificationReport rep = simulate(topo, pl, plan);
  if (!report_path.empty()) write_output(report_path, rep.to_json().dump(2) + "\n");
  return report_verification(rep);
}

int run_verify_plan_file(const std::string& plan_path, const std::string& report_path) {
  std::ifstream is(plan_path);
  if (!is) throw parameter_error("cannot open plan file '" + plan_path + "'");
  nlohmann::json j;
  is >> j;
  const PlanFile file = parse_plan_file(j);

  const Topology topo(file.relays, file.degree);
  const Placement pl = uncoded_placement(topo, file.files, file.t);
  PlanOptions opt;
  opt.salt = file.salt;
  opt.field = file.field;
  const DeliveryPlan reference =
      file.scheme == Scheme::base ? compile_base_plan(topo, pl, file.demand, opt)
                                  : compile_improved_plan(topo, pl, file.demand, opt);
  std::vector<std::string> warnings;
  const DeliveryPlan restricted = restrict_to_records(reference, file.records, &warnings);
  for (const auto& w : warnings) std::cerr << "verify: " << w << "\n";
  VerificationReport rep = simulate(topo, pl, restricted);
  if (!warnings.empty()) {
    rep.invariants_ok = false;
    rep.errors.insert(rep.errors.end(), warnings.begin(), warnings.end());
  }
  if (!report_path.empty()) write_output(report_path, rep.to_json().dump(2) + "\n");
  return report_verification(rep);
}

int run_verify_exhaustive(const GridOptions& opt, const std::string& output) {
  const GridSummary summary = exhaustive_check(opt);
  if (!output.empty()) write_output(output, summary.csv());
  for (const auto& row : summary.rows) {
    if (row.ok()) continue;
    std::cerr << "verify: FAIL H=" << row.H << " r=" << row.r << " t=" << row.t
              << " scheme=" << scheme_name(row.scheme) << " " << row.note << "\n";
  }
  std::cerr << "verify: " << summary.rows.size() << " rows, " << summary.simulated_cells
            << " simulated, " << summary.skipped_cells << " skipped, " << summary.failures
            << " failures\n";
  return summary.failures == 0 ? 0 : 1;
}

int run_curve(const TopologyArgs& args, const std::string& t_list_text,
              const std::string& memory_text, const std::string& output) {
  const Topology topo = args.topology();
  std::vector<int> t_list;
  std::vector<Rational> memories;
  if (!memory_text.empty()) {
    std::stringstream ss(memory_text);
    std::string item;
    while (std::getline(ss, item, ',')) memories.push_back(parse_rational(item));
  }
  if (!t_list_text.empty()) t_list = parse_int_list(t_list_text);
  if (t_list_text.empty() && memory_text.empty())
    for (int t = 0; t <= topo.num_users(); ++t) t_list.push_back(t);
  write_output(output, curve_csv(topo, args.files, t_list, memories, args.salt));
  return 0;
}

int run_bounds(const TopologyArgs& args, const std::string& t_list_text, bool literal) {
  const Topology topo = args.topology();
  std::vector<int> t_list = t_list_text.empty() ? std::vector<int>{} : parse_int_list(t_list_text);
  if (t_list.empty())
    for (int t = 0; t <= topo.num_users(); ++t) t_list.push_back(t);
  bool hypothesis = true;
  const TradeoffCurve cutset = cutset_lower_envelope(topo, args.files, &hypothesis);
  if (!hypothesis)
    std::cerr << "bounds: N < K is outside the lower-bound hypothesis; curve reported anyway\n";
  const int K = topo.num_users();
  for (int t : t_list) {
    const Rational load = closed_form_load(topo, t);
    const Rational memory(BigInt(args.files) * t, BigInt(K));
    const GapReport gap = gap_report(topo, args.files, t, load, cutset);
    std::cout << "t=" << t << " M=" << ratio_string(memory)
              << " load=" << ratio_string(load) << " (" << ratio_double(load) << ")";
    if (t < K) std::cout << " eq4=" << ratio_string(simplified_upper_bound(topo, t));
    std::cout << " cutset=" << ratio_string(evaluate_curve(cutset, memory))
              << " uncoded_gap=" << ratio_string(gap.uncoded_gap)
              << " general_gap=" << ratio_string(gap.general_gap);
    if (literal) std::cout << " literal_sum=" << ratio_string(closed_form_load_literal(topo, t));
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded-caching planner, verifier and analyzer for combination networks"};
  app.require_subcommand(1);

  TopologyArgs plan_args, verify_args, curve_args, bounds_args;
  int plan_t = 0, verify_t = 0;
  std::string plan_scheme = "base", verify_scheme = "base";
  std::string plan_output, verify_output, curve_output;
  std::string verify_plan_file;
  std::string curve_t_list, curve_memory, bounds_t_list;
  bool bounds_literal = false;
  bool verify_exhaustive = false;
  GridOptions grid;

  CLI::App* plan_cmd = app.add_subcommand("plan", "Compile a delivery plan to JSON");
  plan_args.attach(plan_cmd);
  plan_cmd->add_option("--t", plan_t, "Replication parameter t = KM/N")->required();
  plan_cmd->add_option("--scheme", plan_scheme, "base (default) or improved");
  plan_cmd->add_option("--output", plan_output, "Write JSON here instead of stdout");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Verify decodability bit-level");
  verify_cmd->add_option("--plan", verify_plan_file, "Verify a previously emitted plan file");
  verify_args.attach(verify_cmd);
  verify_cmd->get_option("--relays")->required(false);
  verify_cmd->get_option("--degree")->required(false);
  verify_cmd->get_option("--files")->required(false);
  verify_cmd->add_option("--t", verify_t, "Replication parameter t");
  verify_cmd->add_option("--scheme", verify_scheme, "base (default) or improved");
  verify_cmd->add_flag("--exhaustive", verify_exhaustive, "Sweep a full (H, r, t) grid");
  verify_cmd->add_option("--h-max", grid.h_max, "Grid: largest H (default 6)");
  verify_cmd->add_option("--r-max", grid.r_max, "Grid: largest r (default 3)");
  verify_cmd->add_option("--sim-budget", grid.sim_budget,
                         "Skip bit-level simulation above this cost estimate");
  verify_cmd->add_option("--output", verify_output, "Write the JSON/CSV report here");

  CLI::App* curve_cmd = app.add_subcommand("curve", "Emit the memory/load tradeoff CSV");
  curve_args.attach(curve_cmd, false);
  curve_cmd->add_option("--t", curve_t_list, "Comma-separated t values (default: full grid)");
  curve_cmd->add_option("--memory", curve_memory,
                        "Comma-separated memory sizes (num/den), interpolated off-grid");
  curve_cmd->add_option("--output", curve_output, "Write CSV here instead of stdout");

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "Print load, bounds and optimality gaps");
  bounds_args.attach(bounds_cmd, false);
  bounds_cmd->add_option("--t", bounds_t_list, "Comma-separated t values (default: full grid)");
  bounds_cmd->add_flag("--literal-sum", bounds_literal,
                       "Also evaluate the load formula with the |J| = t index as printed");

  try {
    app.parse(argc, argv);
    if (plan_cmd->parsed()) return run_plan(plan_args, plan_t, plan_scheme, plan_output);
    if (verify_cmd->parsed()) {
      if (!verify_plan_file.empty()) return run_verify_plan_file(verify_plan_file, verify_output);
      if (verify_exhaustive) {
        grid.salt = verify_args.salt;
        return run_verify_exhaustive(grid, verify_output);
      }
      if (verify_args.relays == 0)
        throw parameter_error("verify: need --plan, --exhaustive, or a full cell spec");
      return run_verify_cell(verify_args, verify_t, verify_scheme, verify_output);
    }
    if (curve_cmd->parsed())
      return run_curve(curve_args, curve_t_list, curve_memory, curve_output);
    if (bounds_cmd->parsed()) return run_bounds(bounds_args, bounds_t_list, bounds_literal);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
