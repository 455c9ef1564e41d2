#include "csp/master.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace csp {

Rlm::Rlm(std::vector<RowItem> items, int64_t roll_width, const SafeParams& params,
         std::unique_ptr<LpBackend> backend)
    : items_(std::move(items)), W_(roll_width), params_(params), lp_(std::move(backend)) {
  if (!lp_) lp_ = std::make_unique<DenseSimplex>();
  params_.adapt_to_backend(lp_->tolerance_floor());
  lp_->set_optimality_tolerance(std::max(params_.eps_prime, lp_->tolerance_floor()));
  for (size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].demand <= 0) throw std::invalid_argument("row with non-positive demand");
    row_of_item_[items_[i].id] = static_cast<int>(i);
    item_rows_.push_back(lp_->add_row(RowSense::GreaterEqual, static_cast<double>(items_[i].demand)));
  }
  for (size_t i = 0; i < items_.size(); ++i) {
    std::pair<int, double> e{item_rows_[i], 1.0};
    penalty_cols_.push_back(lp_->add_column(penalty_ * params_.C, std::span(&e, 1)));
  }
}

int Rlm::item_row(ItemId id) const {
  auto it = row_of_item_.find(id);
  return it == row_of_item_.end() ? -1 : it->second;
}

std::vector<int64_t> Rlm::demands() const {
  std::vector<int64_t> d;
  d.reserve(items_.size());
  for (const auto& it : items_) d.push_back(it.demand);
  return d;
}

std::vector<std::pair<int, double>> Rlm::column_entries(const Pattern& p) const {
  std::vector<std::pair<int, double>> e;
  for (const auto& pe : p.entries()) {
    int r = item_row(pe.id);
    if (r < 0) throw std::invalid_argument("pattern uses unknown item " + std::to_string(pe.id));
    e.emplace_back(item_rows_[r], static_cast<double>(pe.count));
  }
  for (size_t t = 0; t < cuts_.size(); ++t)
    if (cut_hits(p, cuts_[t])) e.emplace_back(cut_rows_[t], 1.0);
  if (extra_row_ >= 0 && std::find(extra_members_.begin(), extra_members_.end(), p) != extra_members_.end())
    e.emplace_back(extra_row_, 1.0);
  return e;
}

int Rlm::find_column(const Pattern& p) const {
  auto it = col_index_.find(p);
  return it == col_index_.end() ? -1 : it->second;
}

int Rlm::add_column(const Pattern& p) {
  if (p.empty()) return -1;
  if (p.load() > W_) throw std::invalid_argument("pattern exceeds roll width");
  if (auto it = col_index_.find(p); it != col_index_.end()) {
    if (cols_[it->second].handle >= 0) return -1;
    auto e = column_entries(p);
    cols_[it->second].handle = lp_->add_column(params_.C, e);
    ++active_;
    return it->second;
  }
  auto e = column_entries(p);
  int k = static_cast<int>(cols_.size());
  cols_.push_back({p, lp_->add_column(params_.C, e)});
  col_index_.emplace(p, k);
  ++active_;
  return k;
}

int Rlm::add_columns(const std::vector<Pattern>& ps) {
  int n = 0;
  for (const auto& p : ps) n += add_column(p) >= 0;
  return n;
}

void Rlm::remove_column(int k) {
  if (cols_[k].handle < 0) return;
  lp_->remove_column(cols_[k].handle);
  cols_[k].handle = -1;
  --active_;
}

bool Rlm::add_cut(const std::array<ItemId, 3>& triple) {
  auto t = triple;
  std::sort(t.begin(), t.end());
  if (std::find(cuts_.begin(), cuts_.end(), t) != cuts_.end()) return false;
  for (ItemId x : t) {
    int r = item_row(x);
    if (r < 0 || items_[r].demand != 1) throw std::invalid_argument("cut over a non-unit item");
  }
  std::vector<std::pair<int, double>> e;
  int row = lp_->add_row(RowSense::LessEqual, 1.0);
  cuts_.push_back(t);
  cut_rows_.push_back(row);
  for (auto& c : cols_) {
    if (c.handle < 0 || !cut_hits(c.pattern, t)) continue;
    // LP backends take whole columns, so hit columns are re-added with the new entry
    auto entries = column_entries(c.pattern);
    lp_->remove_column(c.handle);
    c.handle = lp_->add_column(params_.C, entries);
  }
  return true;
}

int Rlm::add_cuts(const std::vector<std::array<ItemId, 3>>& triples) {
  int n = 0;
  for (const auto& t : triples) n += add_cut(t);
  return n;
}

double Rlm::cut_coefficient(int column, int cut) const {
  return cut_hits(cols_[column].pattern, cuts_[cut]) ? 1.0 : 0.0;
}

void Rlm::set_extra_row(const std::vector<Pattern>& members, double rhs) {
  if (extra_row_ >= 0) throw std::logic_error("extra row already set");
  extra_members_ = members;
  extra_rhs_ = rhs;
  extra_row_ = lp_->add_row(RowSense::GreaterEqual, rhs);
  for (const auto& p : members) {
    int k = find_column(p);
    if (k >= 0 && cols_[k].handle >= 0) {
      auto entries = column_entries(p);
      lp_->remove_column(cols_[k].handle);
      cols_[k].handle = lp_->add_column(params_.C, entries);
    } else {
      add_column(p);
    }
  }
}

void Rlm::set_penalty(double p) {
  penalty_ = p;
  for (int h : penalty_cols_) lp_->set_cost(h, p * params_.C);
}

void Rlm::install_dual_value_columns(double gamma) {
  gamma_ = gamma;
  if (dual_cols_.empty()) {
    for (size_t i = 0; i < items_.size(); ++i) {
      std::pair<int, double> e{item_rows_[i], 1.0};
      dual_cols_.push_back(
          lp_->add_column(gamma * static_cast<double>(items_[i].size) * params_.C, std::span(&e, 1)));
    }
    return;
  }
  for (size_t i = 0; i < items_.size(); ++i)
    lp_->set_cost(dual_cols_[i], gamma * static_cast<double>(items_[i].size) * params_.C);
}

void Rlm::remove_dual_value_columns() {
  for (int h : dual_cols_) lp_->remove_column(h);
  dual_cols_.clear();
  gamma_ = 0.0;
}

LpSolution Rlm::solve(SolveMode mode) {
  LpResult r = lp_->solve(force_fresh_ ? SolveMode::Fresh : mode);
  force_fresh_ = false;
  LpSolution s;
  s.status = r.status;
  s.iterations = r.iterations;
  s.lp_objective = r.objective / params_.C;
  if (r.status != LpStatus::Optimal) return s;
  auto at = [](const std::vector<double>& v, int h) { return h >= 0 && h < static_cast<int>(v.size()) ? v[h] : 0.0; };
  s.lambda.assign(cols_.size(), 0.0);
  for (size_t k = 0; k < cols_.size(); ++k) {
    if (cols_[k].handle < 0) continue;
    s.lambda[k] = at(r.x, cols_[k].handle);
    s.objective += s.lambda[k];
  }
  for (int h : penalty_cols_) s.penalty_mass += at(r.x, h);
  for (int h : dual_cols_) s.dual_value_mass += at(r.x, h);
  s.pi.resize(items_.size());
  for (size_t i = 0; i < items_.size(); ++i) s.pi[i] = at(r.y, item_rows_[i]) / params_.C;
  s.rho.resize(cuts_.size());
  for (size_t t = 0; t < cuts_.size(); ++t) s.rho[t] = at(r.y, cut_rows_[t]) / params_.C;
  if (extra_row_ >= 0) s.extra_dual = at(r.y, extra_row_) / params_.C;
  return s;
}

Wide Rlm::exact_reduced_cost(int k, const ScaledDuals& s) const {
  if (cols_[k].handle < 0) return 0;
  std::vector<std::pair<int, int64_t>> rows;
  for (const auto& pe : cols_[k].pattern.entries()) rows.emplace_back(item_row(pe.id), pe.count);
  std::vector<int> hit;
  for (size_t t = 0; t < cuts_.size(); ++t)
    if (cut_hits(cols_[k].pattern, cuts_[t])) hit.push_back(static_cast<int>(t));
  return reduced_cost_int(s, rows, hit);
}

bool Rlm::detect_dual_anomaly(const ScaledDuals& s) const {
  for (int k = 0; k < num_columns(); ++k) {
    if (cols_[k].handle < 0) continue;
    // the scaled duals drop the extra row, so its members may price negative legitimately
    if (extra_row_ >= 0 &&
        std::find(extra_members_.begin(), extra_members_.end(), cols_[k].pattern) != extra_members_.end())
      continue;
    if (exact_reduced_cost(k, s) < s.threshold()) return true;
  }
  return false;
}

std::vector<PrimalColumn> Rlm::primal(const LpSolution& sol) const {
  std::vector<PrimalColumn> out;
  for (size_t k = 0; k < cols_.size() && k < sol.lambda.size(); ++k)
    if (cols_[k].handle >= 0 && sol.lambda[k] > 0.0) out.push_back({&cols_[k].pattern, sol.lambda[k]});
  return out;
}

void Rlm::dump_lp(std::ostream& out) const {
  out << "\\ restricted master, W=" << W_ << "\n";
  out << "Minimize\n obj:";
  bool first = true;
  for (size_t k = 0; k < cols_.size(); ++k) {
    if (cols_[k].handle < 0) continue;
    out << (first ? " " : " + ") << "x" << k;
    first = false;
  }
  for (size_t i = 0; i < penalty_cols_.size(); ++i) out << " + " << penalty_ << " p" << i;
  for (size_t i = 0; i < dual_cols_.size(); ++i)
    out << " + " << gamma_ * static_cast<double>(items_[i].size) << " d" << i;
  out << "\nSubject To\n";
  for (size_t i = 0; i < items_.size(); ++i) {
    out << " item_" << items_[i].id << ":";
    for (size_t k = 0; k < cols_.size(); ++k) {
      if (cols_[k].handle < 0) continue;
      int64_t c = cols_[k].pattern.count(items_[i].id);
      if (c > 0) out << " + " << c << " x" << k;
    }
    out << " + p" << i;
    if (!dual_cols_.empty()) out << " + d" << i;
    out << " >= " << items_[i].demand << "\n";
  }
  for (size_t t = 0; t < cuts_.size(); ++t) {
    out << " sri_" << cuts_[t][0] << "_" << cuts_[t][1] << "_" << cuts_[t][2] << ":";
    for (size_t k = 0; k < cols_.size(); ++k)
      if (cols_[k].handle >= 0 && cut_hits(cols_[k].pattern, cuts_[t])) out << " + x" << k;
    out << " <= 1\n";
  }
  if (extra_row_ >= 0) {
    out << " incumbent:";
    for (const auto& p : extra_members_)
      if (int k = find_column(p); k >= 0) out << " + x" << k;
    out << " >= " << extra_rhs_ << "\n";
  }
  out << "Bounds\nEnd\n";
  for (size_t k = 0; k < cols_.size(); ++k)
    if (cols_[k].handle >= 0) out << "\\ x" << k << " = " << cols_[k].pattern.to_string() << "\n";
}

}  // namespace csp
