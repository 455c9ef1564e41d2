#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csp {

enum class RowSense { GreaterEqual, LessEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Numerical };
enum class SolveMode { Warm, Fresh };

const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Numerical;
  double objective = 0.0;
  std::vector<double> x;  // indexed by column handle; 0 for removed columns
  std::vector<double> y;  // indexed by row handle; 0 for removed rows
  int64_t iterations = 0;
};

// Minimization LP over x >= 0 with >= / <= rows. Handles stay valid until removed.
class LpBackend {
 public:
  virtual ~LpBackend() = default;

  virtual int add_row(RowSense sense, double rhs, std::span<const std::pair<int, double>> entries = {}) = 0;
  virtual void set_rhs(int row, double rhs) = 0;
  virtual void remove_row(int row) = 0;
  virtual int add_column(double cost, std::span<const std::pair<int, double>> entries) = 0;
  virtual void set_cost(int col, double cost) = 0;
  virtual void remove_column(int col) = 0;

  virtual LpResult solve(SolveMode mode) = 0;

  // Smallest optimality tolerance the backend can honour.
  virtual double tolerance_floor() const = 0;
  virtual void set_optimality_tolerance(double tol) = 0;
  virtual void set_feasibility_tolerance(double tol) = 0;
  // Opaque solver-specific knobs; unknown keys are ignored.
  virtual void set_hint(const std::string& key, const std::string& value) {
    (void)key;
    (void)value;
  }
};

struct SimplexOptions {
  double optimality_tol = 2.5e-12;
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-9;
  int64_t max_iterations = 500000;
  int refactor_interval = 100;
  int degenerate_run = 50;  // degenerate pivots before switching to Bland's rule
  double declared_floor = 1e-13;
};

// Dense revised simplex with an explicit basis inverse.
class DenseSimplex final : public LpBackend {
 public:
  explicit DenseSimplex(SimplexOptions opts = {});

  int add_row(RowSense sense, double rhs, std::span<const std::pair<int, double>> entries = {}) override;
  void set_rhs(int row, double rhs) override;
  void remove_row(int row) override;
  int add_column(double cost, std::span<const std::pair<int, double>> entries) override;
  void set_cost(int col, double cost) override;
  void remove_column(int col) override;
  LpResult solve(SolveMode mode) override;

  double tolerance_floor() const override { return opts_.declared_floor; }
  void set_optimality_tolerance(double tol) override { opts_.optimality_tol = tol; }
  void set_feasibility_tolerance(double tol) override { opts_.feasibility_tol = tol; }

  int num_rows() const;
  int num_columns() const;

 private:
  struct Row {
    RowSense sense;
    double rhs;
    bool alive;
  };
  struct Col {
    double cost;
    std::vector<std::pair<int, double>> entries;  // (row handle, value)
    bool alive;
  };
  enum class VarKind : uint8_t { Structural, Slack, Artificial };
  struct VarRef {
    VarKind kind;
    int handle;
  };

  class Work;
  friend class Work;

  SimplexOptions opts_;
  std::vector<Row> rows_;
  std::vector<Col> cols_;
  std::vector<VarRef> basis_;
  int basis_row_count_ = 0;
  bool has_basis_ = false;
};

}  // namespace csp
