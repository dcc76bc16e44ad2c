#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "combnet/analysis.hpp"
#include "combnet/delivery_improved.hpp"
#include "combnet/verification.hpp"

namespace combnet {

struct CurveRow {
  int t = 0;  // -1 for memory-sharing rows evaluated off the integer grid
  Rational memory;
  Rational load_base;
  Rational load_improved;
  Rational eq4_bound;
  Rational cutset_bound;
  Rational uncoded_gap;
};

inline std::string curve_csv_header() {
  return "t,M_num,M_den,load_base_num,load_base_den,load_improved_num,load_improved_den,"
         "eq4_num,eq4_den,cutset_num,cutset_den,gap_num,gap_den";
}

namespace detail {

inline void append_rational(std::ostringstream& os, const Rational& r) {
  os << ',' << numerator(r).str() << ',' << denominator(r).str();
}

}  // namespace detail

// Loads on the integer grid come from compiled plans (loads-only mode), so the
// emitted curve is the artifact's own accounting rather than the closed form.
class CurveBuilder {
 public:
  CurveBuilder(const Topology& topo, int num_files, std::uint64_t salt)
      : topo_(&topo), num_files_(num_files), salt_(salt) {
    if (num_files < 1) throw parameter_error("curve: need at least one file");
    cutset_ = cutset_lower_envelope(topo, num_files);
    const int K = topo.num_users();
    demand_ = worst_case_demand(K, num_files);
    grid_base_.resize(K + 1);
    grid_improved_.resize(K + 1);
  }

  CurveRow grid_row(int t) {
    const int K = topo_->num_users();
    if (t < 0 || t > K) throw parameter_error("curve: t must be in [0..K]");
    CurveRow row;
    row.t = t;
    row.memory = Rational(BigInt(num_files_) * t, BigInt(K));
    row.load_base = base_load(t);
    row.load_improved = improved_load(t);
    row.eq4_bound = t < K ? simplified_upper_bound(*topo_, t) : Rational(0);
    row.cutset_bound = evaluate_curve(cutset_, row.memory);
    row.uncoded_gap = gap_report(*topo_, num_files_, t, row.load_base, cutset_).uncoded_gap;
    return row;
  }

  // Off-grid memory points via memory sharing: lower convex envelope of the
  // grid points, marked with t = -1.
  CurveRow memory_row(const Rational& memory) {
    const int K = topo_->num_users();
    if (memory < 0 || memory > num_files_)
      throw parameter_error("curve: memory must be in [0..N]");
    const Rational t_exact = memory * K / num_files_;
    if (denominator(t_exact) == 1 && t_exact >= 0 && t_exact <= K)
      return grid_row(static_cast<int>(numerator(t_exact).convert_to<std::int64_t>()));
    ensure_envelopes();
    CurveRow row;
    row.t = -1;
    row.memory = memory;
    row.load_base = evaluate_curve(*base_env_, memory);
    row.load_improved = evaluate_curve(*improved_env_, memory);
    row.eq4_bound = evaluate_curve(*eq4_env_, memory);
    row.cutset_bound = evaluate_curve(cutset_, memory);
    row.uncoded_gap = row.cutset_bound == 0 ? Rational(1) : row.load_base / row.cutset_bound;
    return row;
  }

  const TradeoffCurve& cutset() const { return cutset_; }

 private:
  Rational base_load(int t) {
    auto& slot = grid_base_[t];
    if (!slot) {
      PlanOptions opt;
      opt.keep_transmissions = false;
      opt.salt = salt_;
      slot = compile_base_plan(*topo_, uncoded_placement(*topo_, num_files_, t), demand_, opt)
                 .max_link_load();
    }
    return *slot;
  }

  Rational improved_load(int t) {
    auto& slot = grid_improved_[t];
    if (!slot) {
      PlanOptions opt;
      opt.keep_transmissions = false;
      opt.salt = salt_;
      slot = compile_improved_plan_auto(*topo_, uncoded_placement(*topo_, num_files_, t), demand_, opt)
                 .max_link_load();
    }
    return *slot;
  }

  void ensure_envelopes() {
    if (base_env_) return;
    const int K = topo_->num_users();
    TradeoffCurve base, improved, eq4;
    for (int t = 0; t <= K; ++t) {
      const Rational m(BigInt(num_files_) * t, BigInt(K));
      base.points.emplace_back(m, base_load(t));
      improved.points.emplace_back(m, improved_load(t));
      eq4.points.emplace_back(m, t < K ? simplified_upper_bound(*topo_, t) : Rational(0));
    }
    base_env_ = lower_convex_envelope(std::move(base));
    improved_env_ = lower_convex_envelope(std::move(improved));
    eq4_env_ = lower_convex_envelope(std::move(eq4));
  }

  const Topology* topo_;
  int num_files_;
  std::uint64_t salt_;
  DemandVector demand_;
  TradeoffCurve cutset_;
  std::vector<std::optional<Rational>> grid_base_;
  std::vector<std::optional<Rational>> grid_improved_;
  std::optional<TradeoffCurve> base_env_;
  std::optional<TradeoffCurve> improved_env_;
  std::optional<TradeoffCurve> eq4_env_;
};

inline std::string curve_csv_line(const CurveRow& row) {
  std::ostringstream os;
  os << row.t;
  detail::append_rational(os, row.memory);
  detail::append_rational(os, row.load_base);
  detail::append_rational(os, row.load_improved);
  detail::append_rational(os, row.eq4_bound);
  detail::append_rational(os, row.cutset_bound);
  detail::append_rational(os, row.uncoded_gap);
  return os.str();
}

inline std::string curve_csv(const Topology& topo, int num_files, const std::vector<int>& t_list,
                             const std::vector<Rational>& memory_list, std::uint64_t salt) {
  CurveBuilder builder(topo, num_files, salt);
  std::ostringstream os;
  os << curve_csv_header() << '\n';
  for (int t : t_list) os << curve_csv_line(builder.grid_row(t)) << '\n';
  for (const Rational& m : memory_list) os << curve_csv_line(builder.memory_row(m)) << '\n';
  return os.str();
}

// Full t grid, the default sweep.
inline std::string curve_csv(const Topology& topo, int num_files, std::uint64_t salt) {
  std::vector<int> t_list(topo.num_users() + 1);
  for (int t = 0; t <= topo.num_users(); ++t) t_list[t] = t;
  return curve_csv(topo, num_files, t_list, {}, salt);
}

}  // namespace combnet
