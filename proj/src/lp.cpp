#include "csp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::Numerical: return "numerical";
  }
  return "?";
}

DenseSimplex::DenseSimplex(SimplexOptions opts) : opts_(opts) {}

int DenseSimplex::add_row(RowSense sense, double rhs, std::span<const std::pair<int, double>> entries) {
  const int h = static_cast<int>(rows_.size());
  rows_.push_back({sense, rhs, true});
  for (auto [col, v] : entries) {
    if (col < 0 || col >= static_cast<int>(cols_.size()) || !cols_[col].alive)
      throw std::out_of_range("add_row: bad column handle");
    if (v != 0.0) cols_[col].entries.emplace_back(h, v);
  }
  return h;
}

void DenseSimplex::set_rhs(int row, double rhs) { rows_.at(row).rhs = rhs; }

void DenseSimplex::remove_row(int row) { rows_.at(row).alive = false; }

int DenseSimplex::add_column(double cost, std::span<const std::pair<int, double>> entries) {
  Col c{cost, {}, true};
  for (auto [row, v] : entries) {
    if (row < 0 || row >= static_cast<int>(rows_.size()) || !rows_[row].alive)
      throw std::out_of_range("add_column: bad row handle");
    if (v != 0.0) c.entries.emplace_back(row, v);
  }
  cols_.push_back(std::move(c));
  return static_cast<int>(cols_.size()) - 1;
}

void DenseSimplex::set_cost(int col, double cost) { cols_.at(col).cost = cost; }

void DenseSimplex::remove_column(int col) {
  auto& c = cols_.at(col);
  c.alive = false;
  c.entries.clear();
  c.entries.shrink_to_fit();
}

int DenseSimplex::num_rows() const {
  return static_cast<int>(std::count_if(rows_.begin(), rows_.end(), [](const Row& r) { return r.alive; }));
}

int DenseSimplex::num_columns() const {
  return static_cast<int>(std::count_if(cols_.begin(), cols_.end(), [](const Col& c) { return c.alive; }));
}

class DenseSimplex::Work {
 public:
  explicit Work(DenseSimplex& lp) : lp_(lp), o_(lp.opts_) {
    pos_of_row_.assign(lp.rows_.size(), -1);
    for (int h = 0; h < static_cast<int>(lp.rows_.size()); ++h) {
      const Row& r = lp.rows_[h];
      if (!r.alive) continue;
      pos_of_row_[h] = m_++;
      row_of_pos_.push_back(h);
      bool ge = r.sense == RowSense::GreaterEqual;
      double s = 1.0;
      double rhs = r.rhs;
      if (rhs < 0) {
        s = -1.0;
        rhs = -rhs;
        ge = !ge;
      }
      sign_.push_back(s);
      ge_.push_back(ge);
      b_.push_back(rhs);
    }
    col_of_handle_.assign(lp.cols_.size(), -1);
    for (int h = 0; h < static_cast<int>(lp.cols_.size()); ++h) {
      const Col& c = lp.cols_[h];
      if (!c.alive) continue;
      col_of_handle_[h] = ns_++;
      handle_of_col_.push_back(h);
      std::vector<std::pair<int, double>> a;
      for (auto [row, v] : c.entries) {
        int p = pos_of_row_[row];
        if (p >= 0) a.emplace_back(p, v * sign_[p]);
      }
      acol_.push_back(std::move(a));
      cost2_.push_back(c.cost);
    }
    nv_ = ns_ + 2 * m_;
    cost2_.resize(nv_, 0.0);
    cost1_.assign(nv_, 0.0);
    for (int p = 0; p < m_; ++p) cost1_[art(p)] = 1.0;
    where_.assign(nv_, -1);
  }

  LpResult run(SolveMode mode) {
    LpResult res;
    res.x.assign(lp_.cols_.size(), 0.0);
    res.y.assign(lp_.rows_.size(), 0.0);
    if (m_ == 0) {
      for (int j = 0; j < ns_; ++j)
        if (cost2_[j] < 0) {
          res.status = LpStatus::Unbounded;
          return res;
        }
      res.status = LpStatus::Optimal;
      return res;
    }

    LpStatus st = LpStatus::Numerical;
    bool done = false;
    if (mode == SolveMode::Warm && lp_.has_basis_ && load_warm_basis()) {
      compute_xb();
      if (primal_feasible()) {
        st = primal(cost2_, false);
        done = st == LpStatus::Optimal;
      } else if (dual_feasible()) {
        st = dual();
        if (st == LpStatus::Optimal) st = primal(cost2_, false);
        done = st == LpStatus::Optimal;
      }
    }
    if (!done) {
      load_slack_basis();
      bool any_art = false;
      for (int k = 0; k < m_; ++k) any_art = any_art || is_art(head_[k]);
      st = LpStatus::Optimal;
      if (any_art) {
        st = primal(cost1_, true);
        if (st == LpStatus::Optimal) {
          refactor();
          double infeas = 0.0, scale = 1.0;
          for (int k = 0; k < m_; ++k) {
            if (is_art(head_[k])) infeas += std::max(0.0, xb_[k]);
            scale = std::max(scale, b_[k]);
          }
          if (infeas > 1e-7 * scale) st = LpStatus::Infeasible;
        }
      }
      if (st == LpStatus::Optimal) st = primal(cost2_, false);
    }
    res.iterations = iterations_;
    res.status = st;
    if (st != LpStatus::Optimal) {
      lp_.has_basis_ = false;
      return res;
    }

    refactor();
    std::vector<double> y = compute_y(cost2_);
    double obj = 0.0;
    for (int k = 0; k < m_; ++k) {
      int j = head_[k];
      double v = std::max(0.0, xb_[k]);
      if (j < ns_) {
        res.x[handle_of_col_[j]] = v;
        obj += cost2_[j] * v;
      }
    }
    for (int p = 0; p < m_; ++p) res.y[row_of_pos_[p]] = sign_[p] * y[p];
    res.objective = obj;

    lp_.basis_.clear();
    for (int k = 0; k < m_; ++k) lp_.basis_.push_back(ref_of(head_[k]));
    lp_.basis_row_count_ = static_cast<int>(lp_.rows_.size());
    lp_.has_basis_ = true;
    return res;
  }

 private:
  int slack(int p) const { return ns_ + p; }
  int art(int p) const { return ns_ + m_ + p; }
  bool is_art(int j) const { return j >= ns_ + m_; }
  bool eligible(int j) const { return j < ns_ + m_; }

  VarRef ref_of(int j) const {
    if (j < ns_) return {VarKind::Structural, handle_of_col_[j]};
    if (j < ns_ + m_) return {VarKind::Slack, row_of_pos_[j - ns_]};
    return {VarKind::Artificial, row_of_pos_[j - ns_ - m_]};
  }

  template <class F>
  void for_column(int j, F&& f) const {
    if (j < ns_) {
      for (auto [p, v] : acol_[j]) f(p, v);
    } else if (j < ns_ + m_) {
      int p = j - ns_;
      f(p, ge_[p] ? -1.0 : 1.0);
    } else {
      f(j - ns_ - m_, 1.0);
    }
  }

  void set_head(std::vector<int> head) {
    std::fill(where_.begin(), where_.end(), -1);
    head_ = std::move(head);
    for (int k = 0; k < m_; ++k) where_[head_[k]] = k;
  }

  void load_slack_basis() {
    std::vector<int> head(m_);
    for (int p = 0; p < m_; ++p) head[p] = ge_[p] ? art(p) : slack(p);
    set_head(std::move(head));
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int p = 0; p < m_; ++p) binv_[idx(p, p)] = 1.0;
    since_refactor_ = 0;
    xb_ = b_;
  }

  bool load_warm_basis() {
    std::vector<int> head;
    std::vector<char> used(nv_, 0);
    auto push = [&](int j) {
      if (j >= 0 && !used[j]) {
        used[j] = 1;
        head.push_back(j);
      }
    };
    for (const VarRef& r : lp_.basis_) {
      if (r.kind == VarKind::Structural) {
        push(col_of_handle_[r.handle]);
        continue;
      }
      int p = pos_of_row_[r.handle];
      if (p < 0) continue;
      push(r.kind == VarKind::Artificial && ge_[p] ? art(p) : slack(p));
    }
    // rows added since the last solve enter with their own slack or artificial
    for (int p = 0; p < m_; ++p)
      if (row_of_pos_[p] >= lp_.basis_row_count_) push(ge_[p] ? art(p) : slack(p));
    if (static_cast<int>(head.size()) != m_) return false;
    set_head(std::move(head));
    return refactor();
  }

  size_t idx(int r, int c) const { return static_cast<size_t>(r) * m_ + c; }

  bool refactor() {
    std::vector<double> a(static_cast<size_t>(m_) * m_, 0.0);
    for (int k = 0; k < m_; ++k)
      for_column(head_[k], [&](int p, double v) { a[idx(p, k)] = v; });
    std::vector<double> inv(static_cast<size_t>(m_) * m_, 0.0);
    for (int p = 0; p < m_; ++p) inv[idx(p, p)] = 1.0;
    std::vector<int> perm(m_);
    for (int p = 0; p < m_; ++p) perm[p] = p;
    // Gauss-Jordan on B, tracking the inverse; rows of the result map to basis positions
    for (int c = 0; c < m_; ++c) {
      int best = -1;
      double bv = 0.0;
      for (int r = c; r < m_; ++r) {
        double v = std::fabs(a[idx(r, c)]);
        if (v > bv) {
          bv = v;
          best = r;
        }
      }
      if (best < 0 || bv < 1e-11) return false;
      if (best != c) {
        for (int t = 0; t < m_; ++t) {
          std::swap(a[idx(best, t)], a[idx(c, t)]);
          std::swap(inv[idx(best, t)], inv[idx(c, t)]);
        }
      }
      double piv = a[idx(c, c)];
      for (int t = 0; t < m_; ++t) {
        a[idx(c, t)] /= piv;
        inv[idx(c, t)] /= piv;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = a[idx(r, c)];
        if (f == 0.0) continue;
        for (int t = 0; t < m_; ++t) {
          a[idx(r, t)] -= f * a[idx(c, t)];
          inv[idx(r, t)] -= f * inv[idx(c, t)];
        }
      }
    }
    binv_ = std::move(inv);
    since_refactor_ = 0;
    compute_xb();
    return true;
  }

  void compute_xb() {
    xb_.assign(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      double s = 0.0;
      const double* row = &binv_[idx(k, 0)];
      for (int p = 0; p < m_; ++p) s += row[p] * b_[p];
      xb_[k] = s;
    }
  }

  std::vector<double> compute_y(const std::vector<double>& c) const {
    std::vector<double> y(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      double cb = c[head_[k]];
      if (cb == 0.0) continue;
      const double* row = &binv_[idx(k, 0)];
      for (int p = 0; p < m_; ++p) y[p] += cb * row[p];
    }
    return y;
  }

  double reduced(int j, const std::vector<double>& y, const std::vector<double>& c) const {
    double d = c[j];
    for_column(j, [&](int p, double v) { d -= y[p] * v; });
    return d;
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> alpha(m_, 0.0);
    for_column(j, [&](int p, double v) {
      for (int k = 0; k < m_; ++k) alpha[k] += binv_[idx(k, p)] * v;
    });
    return alpha;
  }

  void pivot(int r, int q, const std::vector<double>& alpha) {
    double ar = alpha[r];
    double* rowr = &binv_[idx(r, 0)];
    for (int p = 0; p < m_; ++p) rowr[p] /= ar;
    for (int k = 0; k < m_; ++k) {
      if (k == r || alpha[k] == 0.0) continue;
      double f = alpha[k];
      double* rowk = &binv_[idx(k, 0)];
      for (int p = 0; p < m_; ++p) rowk[p] -= f * rowr[p];
    }
    where_[head_[r]] = -1;
    head_[r] = q;
    where_[q] = r;
    ++iterations_;
    if (++since_refactor_ >= o_.refactor_interval) refactor();
  }

  bool primal_feasible() const {
    for (int k = 0; k < m_; ++k) {
      if (xb_[k] < -o_.feasibility_tol) return false;
      if (is_art(head_[k]) && xb_[k] > o_.feasibility_tol) return false;
    }
    return true;
  }

  bool dual_feasible() const {
    std::vector<double> y = compute_y(cost2_);
    for (int j = 0; j < ns_ + m_; ++j) {
      if (where_[j] >= 0) continue;
      if (reduced(j, y, cost2_) < -1e3 * o_.optimality_tol) return false;
    }
    return true;
  }

  LpStatus primal(const std::vector<double>& c, bool phase1) {
    int degenerate = 0;
    bool bland = false;
    const double tol = phase1 ? std::max(o_.optimality_tol, 1e-11) : o_.optimality_tol;
    for (int stable_checks = 0;;) {
      if (iterations_ > o_.max_iterations) return LpStatus::IterationLimit;
      std::vector<double> y = compute_y(c);
      int q = -1;
      double best = -tol;
      for (int j = 0; j < nv_; ++j) {
        if (where_[j] >= 0 || !eligible(j)) continue;
        double d = reduced(j, y, c);
        if (d < -tol) {
          if (bland) {
            q = j;
            break;
          }
          if (d < best) {
            best = d;
            q = j;
          }
        }
      }
      if (q < 0) {
        // confirm on a fresh factorization before declaring optimality
        if (since_refactor_ == 0 || stable_checks > 0) return LpStatus::Optimal;
        if (!refactor()) return LpStatus::Numerical;
        ++stable_checks;
        continue;
      }
      stable_checks = 0;
      std::vector<double> alpha = ftran(q);
      int r = -1;
      double tmin = std::numeric_limits<double>::infinity();
      for (int k = 0; k < m_; ++k) {
        double ak = alpha[k];
        double t;
        if (!phase1 && is_art(head_[k])) {
          if (std::fabs(ak) <= o_.pivot_tol) continue;
          t = 0.0;
        } else {
          if (ak <= o_.pivot_tol) continue;
          t = std::max(xb_[k], 0.0) / ak;
        }
        bool take = false;
        if (r < 0 || t < tmin - 1e-15) take = true;
        else if (t <= tmin + 1e-15) {
          if (bland) take = head_[k] < head_[r];
          else take = std::fabs(ak) > std::fabs(alpha[r]);
        }
        if (take) {
          r = k;
          tmin = t;
        }
      }
      if (r < 0) return LpStatus::Unbounded;
      double t = tmin;
      for (int k = 0; k < m_; ++k) xb_[k] -= t * alpha[k];
      xb_[r] = t;
      pivot(r, q, alpha);
      if (t < 1e-12) {
        if (++degenerate >= o_.degenerate_run) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
  }

  LpStatus dual() {
    for (;;) {
      if (iterations_ > o_.max_iterations) return LpStatus::IterationLimit;
      int r = -1;
      double worst = o_.feasibility_tol;
      bool upper = false;
      for (int k = 0; k < m_; ++k) {
        double v = xb_[k];
        if (-v > worst) {
          worst = -v;
          r = k;
          upper = false;
        } else if (is_art(head_[k]) && v > worst) {
          worst = v;
          r = k;
          upper = true;
        }
      }
      if (r < 0) return LpStatus::Optimal;
      std::vector<double> y = compute_y(cost2_);
      const double* row = &binv_[idx(r, 0)];
      int q = -1;
      double best = std::numeric_limits<double>::infinity();
      double best_abs = 0.0;
      for (int j = 0; j < ns_ + m_; ++j) {
        if (where_[j] >= 0) continue;
        double arj = 0.0;
        for_column(j, [&](int p, double v) { arj += row[p] * v; });
        double a = upper ? arj : -arj;
        if (a <= o_.pivot_tol) continue;
        double ratio = std::max(reduced(j, y, cost2_), 0.0) / a;
        if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && a > best_abs)) {
          best = ratio;
          best_abs = a;
          q = j;
        }
      }
      if (q < 0) return LpStatus::Infeasible;
      std::vector<double> alpha = ftran(q);
      if (std::fabs(alpha[r]) <= o_.pivot_tol) return LpStatus::Numerical;
      double t = xb_[r] / alpha[r];
      for (int k = 0; k < m_; ++k) xb_[k] -= t * alpha[k];
      xb_[r] = t;
      pivot(r, q, alpha);
    }
  }

  DenseSimplex& lp_;
  const SimplexOptions& o_;
  int m_ = 0, ns_ = 0, nv_ = 0;
  std::vector<int> pos_of_row_, row_of_pos_, col_of_handle_, handle_of_col_;
  std::vector<double> sign_, b_, cost1_, cost2_;
  std::vector<char> ge_;
  std::vector<std::vector<std::pair<int, double>>> acol_;
  std::vector<int> head_, where_;
  std::vector<double> binv_, xb_;
  int since_refactor_ = 0;
  int64_t iterations_ = 0;
};

LpResult DenseSimplex::solve(SolveMode mode) {
  Work w(*this);
  return w.run(mode);
}

}  // namespace csp
