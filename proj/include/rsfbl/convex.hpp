#pragma once

// Self-contained solver for concave maximization problems of the form
//
//   maximize  c^T x
//   s.t.      a_i^T x + b_i >= 0                        (affine)
//             || A_j x + b_j ||_2 <= c_j^T x + d_j      (second-order cone)
//             w_m * ln(1 + f_m^T x + f0_m) + g_m^T x + g0_m >= 0, w_m > 0
//                                                       (logarithmic)
//
// solved with a primal barrier interior-point method: a phase-1 pass finds
// a strictly interior point (or an infeasibility witness), then standard
// path following with Newton centering. Variables can be pinned to zero,
// which eliminates them from the solve while keeping indices stable; pinned
// entries come back as exact zeros in the returned assignment.
//
// Numerical breakdown is reported through the status, never as a crash.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rsfbl::convex {

/// Linear functional coeffs . x + constant over the program's variables.
struct LinExpr {
  Eigen::VectorXd coeffs;
  double constant = 0.0;

  double eval(const Eigen::VectorXd& x) const {
    return coeffs.dot(x) + constant;
  }
};

struct AffineConstraint {
  LinExpr expr;  // expr >= 0
  std::string label;
};

struct SocConstraint {
  std::vector<LinExpr> elements;  // ||elements(x)|| <= bound(x)
  LinExpr bound;
  std::string label;
};

struct LogConstraint {
  double weight = 1.0;  // > 0
  LinExpr arg;          // weight * ln(1 + arg(x)) + linear(x) >= 0
  LinExpr linear;
  std::string label;
};

enum class SolveState {
  Optimal,
  Infeasible,
  IterationLimit,
  NumericalFailure,
};

const char* to_string(SolveState s);

struct SolveStatus {
  SolveState state = SolveState::NumericalFailure;
  double objective_value = 0.0;
  double kkt_residual = 0.0;  // duality-gap bound at the returned point
  std::string message;
};

struct Solution {
  SolveStatus status;
  Eigen::VectorXd x;  // full-length assignment, pinned entries exactly 0
};

struct FeasibilityReport {
  bool feasible = false;
  Eigen::VectorXd point;  // strictly interior when feasible
  // Optimal relaxation level: negative margins certify strict feasibility,
  // nonnegative values witness infeasibility.
  double relaxation = 0.0;
};

class ConvexProgram {
 public:
  /// Declares `count` new variables under `name`; returns their offset.
  /// All variables must be declared before any expression is created.
  int add_variable_block(const std::string& name, int count);

  /// (offset, count) of a declared block. Throws on unknown names.
  std::pair<int, int> block(const std::string& name) const;
  bool has_block(const std::string& name) const;
  int num_variables() const { return num_vars_; }

  /// Zero-initialized expression sized to the declared variables.
  LinExpr expr() const;

  void set_objective(LinExpr objective);  // maximized
  const LinExpr& objective() const { return objective_; }

  void add_affine(LinExpr expr, std::string label);
  void add_soc(std::vector<LinExpr> elements, LinExpr bound,
               std::string label);
  void add_log(double weight, LinExpr arg, LinExpr linear, std::string label);

  /// Adds ||x|| <= radius over all variables. Keeps the barrier bounded in
  /// directions the problem leaves free; choose radius far beyond any
  /// meaningful coordinate so optima are unaffected.
  void set_bounding_ball(double radius);
  std::optional<double> bounding_ball() const { return ball_radius_; }

  /// Fixes a whole block (or one variable) to zero; the solver removes the
  /// corresponding columns. Constraints whose rows become identically zero
  /// with a nonnegative constant are dropped.
  void pin_zero(const std::string& block_name);
  void pin_zero_index(int index);
  const std::vector<bool>& pinned() const { return pinned_; }
  bool any_pinned() const;

  /// Removes every constraint whose label starts with `prefix`.
  void remove_constraints_with_prefix(const std::string& prefix);

  /// Optional warm-start point (full length); used when strictly feasible.
  void set_start_hint(Eigen::VectorXd hint) { hint_ = std::move(hint); }
  const std::optional<Eigen::VectorXd>& start_hint() const { return hint_; }

  const std::vector<AffineConstraint>& affine_constraints() const {
    return affine_;
  }
  const std::vector<SocConstraint>& soc_constraints() const { return socs_; }
  const std::vector<LogConstraint>& log_constraints() const { return logs_; }

  /// Reads a named block out of a full-length assignment.
  Eigen::VectorXd slice(const std::string& name,
                        const Eigen::VectorXd& x) const;

  /// Structural sanity checks; throws std::invalid_argument on malformed
  /// programs (wrong expression sizes, nonpositive log weights, ...).
  void validate() const;

 private:
  friend Solution solve(const ConvexProgram&, double, int);
  friend FeasibilityReport feasibility_phase(const ConvexProgram&);

  void check_sized(const LinExpr& e, const char* where) const;

  int num_vars_ = 0;
  std::vector<std::pair<std::string, std::pair<int, int>>> blocks_;
  LinExpr objective_;
  std::vector<AffineConstraint> affine_;
  std::vector<SocConstraint> socs_;
  std::vector<LogConstraint> logs_;
  std::vector<bool> pinned_;
  std::optional<double> ball_radius_;
  std::optional<Eigen::VectorXd> hint_;
};

/// Maximizes the program's objective. `tol` bounds the duality gap of a
/// returned Optimal solution; `max_iter` caps Newton steps (the phase-1
/// pass, when needed, gets the same budget separately).
Solution solve(const ConvexProgram& program, double tol = 1e-7,
               int max_iter = 200);

/// Finds a strictly interior point or an infeasibility witness by
/// minimizing a shared constraint relaxation.
FeasibilityReport feasibility_phase(const ConvexProgram& program);

}  // namespace rsfbl::convex
