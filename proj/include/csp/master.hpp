#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "csp/cuts.hpp"
#include "csp/lp.hpp"
#include "csp/pattern.hpp"
#include "csp/rational.hpp"
#include "csp/safebound.hpp"

namespace csp {

struct RowItem {
  ItemId id = 0;
  int64_t size = 0;
  int64_t demand = 0;
};

struct LpSolution {
  LpStatus status = LpStatus::Numerical;
  double objective = 0.0;      // pattern columns only
  double lp_objective = 0.0;   // all columns
  std::vector<double> lambda;  // per column index, 0 for removed columns
  std::vector<double> pi;      // per item row
  std::vector<double> rho;     // per cut
  double extra_dual = 0.0;
  double penalty_mass = 0.0;
  double dual_value_mass = 0.0;
  int64_t iterations = 0;

  // no penalty or dual-value column carries weight
  bool pure() const { return penalty_mass <= 1e-9 && dual_value_mass <= 1e-9; }
};

class Rlm {
 public:
  Rlm(std::vector<RowItem> items, int64_t roll_width, const SafeParams& params,
      std::unique_ptr<LpBackend> backend = nullptr);

  const std::vector<RowItem>& items() const { return items_; }
  int64_t roll_width() const { return W_; }
  int item_row(ItemId id) const;
  std::vector<int64_t> demands() const;
  const SafeParams& params() const { return params_; }

  int num_columns() const { return static_cast<int>(cols_.size()); }
  bool column_alive(int k) const { return cols_[k].handle >= 0; }
  const Pattern& column(int k) const { return cols_[k].pattern; }
  int active_columns() const { return active_; }
  // -1 when the pattern is already active
  int add_column(const Pattern& p);
  int add_columns(const std::vector<Pattern>& ps);
  int find_column(const Pattern& p) const;
  void remove_column(int k);

  const std::vector<std::array<ItemId, 3>>& cuts() const { return cuts_; }
  bool add_cut(const std::array<ItemId, 3>& triple);
  int add_cuts(const std::vector<std::array<ItemId, 3>>& triples);
  double cut_coefficient(int column, int cut) const;

  // sum over members of lambda >= rhs
  void set_extra_row(const std::vector<Pattern>& members, double rhs);
  bool has_extra_row() const { return extra_row_ >= 0; }

  double penalty() const { return penalty_; }
  void set_penalty(double p);

  void install_dual_value_columns(double gamma);
  void remove_dual_value_columns();
  bool has_dual_value_columns() const { return !dual_cols_.empty(); }
  double gamma() const { return gamma_; }

  LpSolution solve(SolveMode mode);

  // K - sum a pi_int - sum rho_int over hit cuts, per column (removed columns get 0)
  Wide exact_reduced_cost(int k, const ScaledDuals& s) const;
  bool detect_dual_anomaly(const ScaledDuals& s) const;

  std::vector<PrimalColumn> primal(const LpSolution& sol) const;
  void dump_lp(std::ostream& out) const;

 private:
  struct Col {
    Pattern pattern;
    int handle = -1;
  };

  std::vector<std::pair<int, double>> column_entries(const Pattern& p) const;

  std::vector<RowItem> items_;
  std::unordered_map<ItemId, int> row_of_item_;
  int64_t W_;
  SafeParams params_;
  std::unique_ptr<LpBackend> lp_;
  std::vector<int> item_rows_;
  std::vector<Col> cols_;
  std::unordered_map<Pattern, int, PatternHash> col_index_;
  int active_ = 0;
  std::vector<std::array<ItemId, 3>> cuts_;
  std::vector<int> cut_rows_;
  std::vector<int> penalty_cols_;
  double penalty_ = 2.0;
  std::vector<int> dual_cols_;
  double gamma_ = 0.0;
  int extra_row_ = -1;
  std::vector<Pattern> extra_members_;
  double extra_rhs_ = 0.0;
  bool force_fresh_ = true;
};

}  // namespace csp
