#include "rsfbl/convex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace rsfbl::convex {

namespace {

constexpr double kDomainMargin = 1e-9;   // strictness required of warm starts
constexpr double kInnerTol = 1e-8;       // Newton decrement^2 / 2 target
constexpr double kStallTol = 1e-3;       // acceptable decrement when stalled
constexpr double kPathMu = 20.0;         // barrier parameter growth
constexpr double kArmijoSlope = 0.3;
constexpr double kBacktrack = 0.5;

// ---------------------------------------------------------------------------
// Reduced (pin-eliminated) program representation.

struct RAff {
  Eigen::VectorXd a;
  double b;
};

struct RSoc {
  Eigen::MatrixXd A;  // rows are the cone elements
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double d;
  Eigen::MatrixXd AtA;  // cached A^T A, reused every Newton step
};

struct RLog {
  double w;
  Eigen::VectorXd f;
  double f0;
  Eigen::VectorXd g;
  double g0;
};

struct Reduced {
  int n = 0;
  Eigen::VectorXd obj;
  double obj_const = 0.0;
  std::vector<RAff> affs;
  std::vector<RSoc> socs;
  std::vector<RLog> logs;
  std::optional<double> ball;

  double barrier_complexity() const {
    return static_cast<double>(affs.size()) + 2.0 * socs.size() +
           2.0 * logs.size() + (ball ? 2.0 : 0.0);
  }
};

struct ReduceOutcome {
  bool constant_infeasible = false;
  std::string message;
  Reduced reduced;
  std::vector<int> active;  // active full indices in order
};

Eigen::VectorXd select(const Eigen::VectorXd& full,
                       const std::vector<int>& active) {
  Eigen::VectorXd out(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) out[i] = full[active[i]];
  return out;
}

ReduceOutcome reduce_program(const ConvexProgram& p) {
  ReduceOutcome out;
  const auto& pinned = p.pinned();
  for (int i = 0; i < p.num_variables(); ++i) {
    if (pinned.empty() || !pinned[i]) out.active.push_back(i);
  }
  Reduced& r = out.reduced;
  r.n = static_cast<int>(out.active.size());
  r.obj = select(p.objective().coeffs, out.active);
  r.obj_const = p.objective().constant;
  r.ball = p.bounding_ball();

  auto zero_row = [](const Eigen::VectorXd& v) { return v.lpNorm<1>() == 0.0; };

  for (const AffineConstraint& ac : p.affine_constraints()) {
    Eigen::VectorXd a = select(ac.expr.coeffs, out.active);
    if (zero_row(a)) {
      if (ac.expr.constant < -1e-12) {
        out.constant_infeasible = true;
        out.message = "constraint '" + ac.label +
                      "' reduces to the false constant " +
                      std::to_string(ac.expr.constant) + " >= 0";
        return out;
      }
      continue;
    }
    r.affs.push_back({std::move(a), ac.expr.constant});
  }
  for (const SocConstraint& sc : p.soc_constraints()) {
    Eigen::MatrixXd A(sc.elements.size(), r.n);
    Eigen::VectorXd b(sc.elements.size());
    for (std::size_t i = 0; i < sc.elements.size(); ++i) {
      A.row(i) = select(sc.elements[i].coeffs, out.active).transpose();
      b[i] = sc.elements[i].constant;
    }
    Eigen::VectorXd c = select(sc.bound.coeffs, out.active);
    if (A.lpNorm<1>() == 0.0 && zero_row(c)) {
      if (b.norm() > sc.bound.constant + 1e-12) {
        out.constant_infeasible = true;
        out.message = "cone constraint '" + sc.label +
                      "' reduces to a false constant";
        return out;
      }
      continue;
    }
    Eigen::MatrixXd AtA = A.transpose() * A;
    r.socs.push_back(
        {std::move(A), std::move(b), std::move(c), sc.bound.constant, std::move(AtA)});
  }
  for (const LogConstraint& lc : p.log_constraints()) {
    Eigen::VectorXd f = select(lc.arg.coeffs, out.active);
    Eigen::VectorXd g = select(lc.linear.coeffs, out.active);
    if (zero_row(f) && zero_row(g)) {
      const double arg1 = 1.0 + lc.arg.constant;
      if (arg1 <= 0.0 ||
          lc.weight * std::log(arg1) + lc.linear.constant < -1e-12) {
        out.constant_infeasible = true;
        out.message = "log constraint '" + lc.label +
                      "' reduces to a false constant";
        return out;
      }
      continue;
    }
    r.logs.push_back(
        {lc.weight, std::move(f), lc.arg.constant, std::move(g), lc.linear.constant});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Barrier evaluation.

// Minimum slack across all constraints (normalized only by being absolute);
// > 0 means strictly inside the domain.
double min_slack(const Reduced& r, const Eigen::VectorXd& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const RAff& a : r.affs) m = std::min(m, a.a.dot(x) + a.b);
  for (const RSoc& s : r.socs) {
    const double z = s.c.dot(x) + s.d;
    m = std::min(m, z);
    const Eigen::VectorXd w = s.A * x + s.b;
    m = std::min(m, z * z - w.squaredNorm());
  }
  for (const RLog& l : r.logs) {
    const double L = 1.0 + l.f.dot(x) + l.f0;
    m = std::min(m, L);
    if (L > 0.0) m = std::min(m, l.w * std::log(L) + l.g.dot(x) + l.g0);
  }
  if (r.ball) m = std::min(m, *r.ball * *r.ball - x.squaredNorm());
  return m;
}

bool in_domain(const Reduced& r, const Eigen::VectorXd& x) {
  return min_slack(r, x) > 0.0;
}

// f_t(x) = -t * obj.x + barrier(x); +inf outside the domain.
// Merit change f(x + step*dir) - f(x), assembled from relative slack
// changes.  Evaluating the merit at both points and subtracting loses all
// resolution once t is large (the linear term dwarfs the barrier), so each
// barrier term contributes -log1p(ds/s) instead.  Returns +inf when the
// candidate leaves the domain.  Assumes x itself is strictly interior.
double merit_delta(const Reduced& r, double t, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& dir, double step) {
  double delta = -t * step * r.obj.dot(dir);
  auto ratio_term = [](double rel) {
    return (rel <= -1.0) ? std::numeric_limits<double>::infinity()
                         : -std::log1p(rel);
  };
  for (const RAff& a : r.affs) {
    const double s = a.a.dot(x) + a.b;
    delta += ratio_term(step * a.a.dot(dir) / s);
    if (!std::isfinite(delta)) return delta;
  }
  for (const RSoc& s : r.socs) {
    const double z = s.c.dot(x) + s.d;
    const double dz = step * s.c.dot(dir);
    if (z + dz <= 0.0) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd w = s.A * x + s.b;
    const Eigen::VectorXd dw = step * (s.A * dir);
    const double psi = z * z - w.squaredNorm();
    const double dpsi =
        2.0 * z * dz + dz * dz - 2.0 * w.dot(dw) - dw.squaredNorm();
    delta += ratio_term(dpsi / psi);
    if (!std::isfinite(delta)) return delta;
  }
  for (const RLog& l : r.logs) {
    const double L = 1.0 + l.f.dot(x) + l.f0;
    const double relL = step * l.f.dot(dir) / L;
    if (relL <= -1.0) return std::numeric_limits<double>::infinity();
    const double h = l.w * std::log(L) + l.g.dot(x) + l.g0;
    const double dh = l.w * std::log1p(relL) + step * l.g.dot(dir);
    delta += ratio_term(dh / h) + ratio_term(relL);
    if (!std::isfinite(delta)) return delta;
  }
  if (r.ball) {
    const double psi = *r.ball * *r.ball - x.squaredNorm();
    const double dpsi = -step * (2.0 * x.dot(dir) + step * dir.squaredNorm());
    delta += ratio_term(dpsi / psi);
  }
  return delta;
}

void grad_hess(const Reduced& r, double t, const Eigen::VectorXd& x,
               Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  grad = -t * r.obj;
  hess.setZero(r.n, r.n);
  for (const RAff& a : r.affs) {
    const double s = a.a.dot(x) + a.b;
    grad.noalias() -= a.a / s;
    hess.noalias() += (a.a * a.a.transpose()) / (s * s);
  }
  for (const RSoc& s : r.socs) {
    const double z = s.c.dot(x) + s.d;
    const Eigen::VectorXd w = s.A * x + s.b;
    const double psi = z * z - w.squaredNorm();
    const Eigen::VectorXd Atw = s.A.transpose() * w;
    const Eigen::VectorXd dpsi = 2.0 * z * s.c - 2.0 * Atw;
    grad.noalias() -= dpsi / psi;
    hess.noalias() += (dpsi * dpsi.transpose()) / (psi * psi);
    hess.noalias() += (2.0 / psi) * s.AtA;
    hess.noalias() -= (2.0 / psi) * (s.c * s.c.transpose());
  }
  for (const RLog& l : r.logs) {
    const double L = 1.0 + l.f.dot(x) + l.f0;
    const double h = l.w * std::log(L) + l.g.dot(x) + l.g0;
    const Eigen::VectorXd dh = (l.w / L) * l.f + l.g;
    grad.noalias() -= dh / h + l.f / L;
    hess.noalias() += (dh * dh.transpose()) / (h * h);
    hess.noalias() += (l.w / (h * L * L) + 1.0 / (L * L)) * (l.f * l.f.transpose());
  }
  if (r.ball) {
    const double psi = *r.ball * *r.ball - x.squaredNorm();
    grad.noalias() += (2.0 / psi) * x;
    hess.noalias() += (4.0 / (psi * psi)) * (x * x.transpose());
    hess.diagonal().array() += 2.0 / psi;
  }
}

// ---------------------------------------------------------------------------
// Newton centering and path following.

struct CenterResult {
  bool ok = false;
  bool stalled = false;
  std::string message;
};

CenterResult center(const Reduced& r, double t, Eigen::VectorXd& x,
                    int& newton_budget) {
  CenterResult res;
  Eigen::VectorXd grad(r.n);
  Eigen::MatrixXd hess(r.n, r.n);
  int no_progress = 0;
  while (newton_budget > 0) {
    --newton_budget;
    grad_hess(r, t, x, grad, hess);
    if (!grad.allFinite()) {
      res.message = "non-finite gradient";
      return res;
    }

    Eigen::VectorXd dir;
    double decrement2 = -1.0;
    double reg = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::MatrixXd H = hess;
      if (reg > 0.0) H.diagonal().array() += reg;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() == Eigen::Success) {
        dir = ldlt.solve(-grad);
        decrement2 = -grad.dot(dir);
        if (dir.allFinite() && decrement2 >= 0.0) break;
      }
      reg = (reg == 0.0) ? 1e-10 * (1.0 + hess.diagonal().maxCoeff()) : reg * 100.0;
      decrement2 = -1.0;
    }
    if (decrement2 < 0.0) {
      res.message = "Newton system could not be solved";
      return res;
    }
    if (0.5 * decrement2 <= kInnerTol) {
      res.ok = true;
      return res;
    }

    const double slope = grad.dot(dir);  // = -decrement2
    double step = 1.0;
    bool moved = false;
    double achieved = 0.0;
    for (int ls = 0; ls < 70; ++ls) {
      const double df = merit_delta(r, t, x, dir, step);
      if (std::isfinite(df) && df <= kArmijoSlope * step * slope) {
        x += step * dir;
        moved = true;
        achieved = df;
        break;
      }
      step *= kBacktrack;
    }
    if (!moved) {
      // Line search exhausted: either we are numerically centered or stuck.
      res.ok = 0.5 * decrement2 <= kStallTol;
      res.stalled = true;
      if (!res.ok) res.message = "line search stalled with large Newton decrement";
      return res;
    }
    if (achieved >= -1e-11) {
      // Steps keep being accepted but the merit no longer moves; finishing
      // here with a moderate decrement is as centered as doubles allow.
      if (++no_progress >= 4) {
        res.ok = 0.5 * decrement2 <= kStallTol;
        res.stalled = true;
        if (!res.ok) res.message = "centering stalled without merit progress";
        return res;
      }
    } else {
      no_progress = 0;
    }
    if (x.norm() > 1e12) {
      res.message = "iterate diverged";
      return res;
    }
  }
  res.message = "Newton budget exhausted";
  res.stalled = true;
  return res;
}

struct PathResult {
  SolveState state = SolveState::NumericalFailure;
  double gap = std::numeric_limits<double>::infinity();
  std::string message;
};

PathResult follow_path(
    const Reduced& r, Eigen::VectorXd& x, double tol, int newton_budget,
    const std::function<bool(const Eigen::VectorXd&)>& early_stop = nullptr) {
  PathResult out;
  const double m = r.barrier_complexity();
  if (m == 0.0 || r.n == 0) {
    out.state = SolveState::Optimal;
    out.gap = 0.0;
    return out;
  }
  double t = 1.0;
  int budget = newton_budget;
  bool have_centered = false;
  Eigen::VectorXd centered;
  double centered_gap = std::numeric_limits<double>::infinity();
  while (true) {
    const CenterResult cr = center(r, t, x, budget);
    if (!cr.ok) {
      if (have_centered) {
        // The tail of the path broke down numerically; the last centered
        // point is still valid, carrying its honest (larger) gap.
        x = centered;
        out.state = SolveState::IterationLimit;
        out.gap = centered_gap;
        out.message = "path stopped early: " + cr.message;
      } else {
        out.state = (budget <= 0) ? SolveState::IterationLimit
                                  : SolveState::NumericalFailure;
        out.gap = m / t;
        out.message = cr.message;
      }
      return out;
    }
    have_centered = true;
    centered = x;
    centered_gap = m / t;
    out.gap = centered_gap;
    if (early_stop && early_stop(x)) {
      out.state = SolveState::Optimal;
      return out;
    }
    if (out.gap <= tol) {
      out.state = SolveState::Optimal;
      return out;
    }
    if (budget <= 0) {
      out.state = SolveState::IterationLimit;
      out.message = "Newton budget exhausted before reaching the target gap";
      return out;
    }
    t *= kPathMu;
  }
}

// ---------------------------------------------------------------------------
// Phase 1: minimize a shared relaxation s over the relaxed constraints.

struct Phase1Result {
  bool solved = false;        // the relaxation problem itself was solved
  bool feasible = false;      // strictly interior point found
  Eigen::VectorXd x;          // interior point when feasible
  double relaxation = 0.0;    // final s
  std::string message;
};

Reduced build_phase1(const Reduced& r, double ball_radius) {
  Reduced p1;
  p1.n = r.n + 1;
  p1.obj = Eigen::VectorXd::Zero(p1.n);
  p1.obj[r.n] = -1.0;  // maximize -s
  auto lift = [&](const Eigen::VectorXd& v, double s_coeff) {
    Eigen::VectorXd out(p1.n);
    out.head(r.n) = v;
    out[r.n] = s_coeff;
    return out;
  };
  for (const RAff& a : r.affs) p1.affs.push_back({lift(a.a, 1.0), a.b});
  for (const RSoc& s : r.socs) {
    Eigen::MatrixXd A(s.A.rows(), p1.n);
    A.leftCols(r.n) = s.A;
    A.col(r.n).setZero();
    Eigen::MatrixXd AtA = A.transpose() * A;
    p1.socs.push_back({A, s.b, lift(s.c, 1.0), s.d, std::move(AtA)});
  }
  for (const RLog& l : r.logs) {
    p1.logs.push_back({l.w, lift(l.f, 1.0), l.f0, lift(l.g, 1.0), l.g0});
  }
  if (r.ball) {
    // Keep the program's own ball (on x only) as a cone constraint.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(r.n, p1.n);
    A.leftCols(r.n).setIdentity();
    Eigen::MatrixXd AtA = A.transpose() * A;
    p1.socs.push_back({A, Eigen::VectorXd::Zero(r.n),
                       Eigen::VectorXd::Zero(p1.n), *r.ball, std::move(AtA)});
  }
  // Keep s itself bounded below so the relaxation problem is proper.
  Eigen::VectorXd s_low = Eigen::VectorXd::Zero(p1.n);
  s_low[r.n] = 1.0;
  p1.affs.push_back({s_low, 2.0});
  p1.ball = ball_radius;
  return p1;
}

double initial_relaxation(const Reduced& r, const Eigen::VectorXd& x0) {
  double s0 = 1.0;
  for (const RAff& a : r.affs) s0 = std::max(s0, -(a.a.dot(x0) + a.b) + 1.0);
  for (const RSoc& s : r.socs) {
    const double z = s.c.dot(x0) + s.d;
    s0 = std::max(s0, (s.A * x0 + s.b).norm() - z + 1.0);
  }
  for (const RLog& l : r.logs) {
    // Need 1 + f.x + f0 + s > 0 and w*ln(...) + g.x + g0 + s > 0; both grow
    // with s, so double until comfortably positive.
    const double u = l.f.dot(x0) + l.f0;
    const double v = l.g.dot(x0) + l.g0;
    double cand = std::max(s0, -u + 1e-3);
    for (int i = 0; i < 300; ++i) {
      if (1.0 + u + cand > 1e-9 &&
          l.w * std::log(1.0 + u + cand) + v + cand > 1e-6) {
        break;
      }
      cand = cand * 2.0 + 1.0;
    }
    s0 = std::max(s0, cand);
  }
  return s0;
}

Phase1Result run_phase1(const Reduced& r, const Eigen::VectorXd& x0,
                        int newton_budget) {
  Phase1Result res;
  double radius = 0.0;
  for (const RAff& a : r.affs) radius = std::max(radius, std::abs(a.b));
  radius = std::max(radius, 1.0);

  Eigen::VectorXd x_start = x0;
  if (r.ball && x_start.norm() >= *r.ball) x_start.setZero();
  const double s0 = initial_relaxation(r, x_start);
  double ball1 = std::max(200.0, 50.0 * (x_start.norm() + s0 + radius));
  if (r.ball) ball1 = std::max(ball1, 1.5 * *r.ball);

  for (int attempt = 0; attempt < 3; ++attempt) {
    const Reduced p1 = build_phase1(r, ball1);
    Eigen::VectorXd y(p1.n);
    y.head(r.n) = x_start;
    y[r.n] = s0;
    if (!in_domain(p1, y)) {
      // The doubling search above should have prevented this.
      y[r.n] = s0 * 4.0 + 10.0;
      if (!in_domain(p1, y)) {
        res.message = "could not initialize the relaxation";
        return res;
      }
    }
    auto deep_enough = [&](const Eigen::VectorXd& cand) {
      return cand[r.n] <= -1e-2 && in_domain(r, cand.head(r.n));
    };
    PathResult pr = follow_path(p1, y, 1e-9, newton_budget, deep_enough);
    if (pr.state != SolveState::Optimal) {
      res.message = "relaxation solve failed: " + pr.message;
      return res;
    }
    const double s_final = y[r.n];
    if (s_final < -1e-9 && in_domain(r, y.head(r.n))) {
      res.solved = true;
      res.feasible = true;
      res.x = y.head(r.n);
      res.relaxation = s_final;
      return res;
    }
    // Infeasible verdict; retry with a larger search region if the ball was
    // doing the constraining.
    if (y.norm() < 0.9 * ball1) {
      res.solved = true;
      res.feasible = false;
      res.relaxation = s_final;
      res.message = "no strictly feasible point; best relaxation " +
                    std::to_string(s_final);
      return res;
    }
    ball1 *= 100.0;
  }
  res.solved = true;
  res.feasible = false;
  res.message = "no strictly feasible point found within the search region";
  return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvexProgram.

const char* to_string(SolveState s) {
  switch (s) {
    case SolveState::Optimal: return "optimal";
    case SolveState::Infeasible: return "infeasible";
    case SolveState::IterationLimit: return "iteration_limit";
    case SolveState::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

int ConvexProgram::add_variable_block(const std::string& name, int count) {
  if (count <= 0) {
    throw std::invalid_argument("add_variable_block: count must be positive");
  }
  if (has_block(name)) {
    throw std::invalid_argument("add_variable_block: duplicate block '" + name + "'");
  }
  if (objective_.coeffs.size() > 0 || !affine_.empty() || !socs_.empty() ||
      !logs_.empty()) {
    throw std::invalid_argument(
        "add_variable_block: declare all variables before adding expressions");
  }
  const int offset = num_vars_;
  blocks_.push_back({name, {offset, count}});
  num_vars_ += count;
  pinned_.resize(num_vars_, false);
  return offset;
}

std::pair<int, int> ConvexProgram::block(const std::string& name) const {
  for (const auto& [n, span] : blocks_) {
    if (n == name) return span;
  }
  throw std::invalid_argument("unknown variable block '" + name + "'");
}

bool ConvexProgram::has_block(const std::string& name) const {
  for (const auto& [n, span] : blocks_) {
    if (n == name) return true;
  }
  return false;
}

LinExpr ConvexProgram::expr() const {
  LinExpr e;
  e.coeffs = Eigen::VectorXd::Zero(num_vars_);
  return e;
}

void ConvexProgram::check_sized(const LinExpr& e, const char* where) const {
  if (e.coeffs.size() != num_vars_) {
    throw std::invalid_argument(std::string(where) +
                                ": expression sized for a different program");
  }
  if (!e.coeffs.allFinite() || !std::isfinite(e.constant)) {
    throw std::invalid_argument(std::string(where) + ": non-finite coefficients");
  }
}

void ConvexProgram::set_objective(LinExpr objective) {
  check_sized(objective, "set_objective");
  objective_ = std::move(objective);
}

void ConvexProgram::add_affine(LinExpr expr, std::string label) {
  check_sized(expr, "add_affine");
  affine_.push_back({std::move(expr), std::move(label)});
}

void ConvexProgram::add_soc(std::vector<LinExpr> elements, LinExpr bound,
                            std::string label) {
  for (const LinExpr& e : elements) check_sized(e, "add_soc");
  check_sized(bound, "add_soc");
  socs_.push_back({std::move(elements), std::move(bound), std::move(label)});
}

void ConvexProgram::add_log(double weight, LinExpr arg, LinExpr linear,
                            std::string label) {
  if (!(weight > 0.0)) {
    throw std::invalid_argument("add_log: weight must be positive");
  }
  check_sized(arg, "add_log");
  check_sized(linear, "add_log");
  logs_.push_back({weight, std::move(arg), std::move(linear), std::move(label)});
}

void ConvexProgram::set_bounding_ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("set_bounding_ball: radius must be positive");
  }
  ball_radius_ = radius;
}

void ConvexProgram::pin_zero(const std::string& block_name) {
  const auto [offset, count] = block(block_name);
  for (int i = 0; i < count; ++i) pinned_[offset + i] = true;
}

void ConvexProgram::pin_zero_index(int index) {
  if (index < 0 || index >= num_vars_) {
    throw std::invalid_argument("pin_zero_index: index out of range");
  }
  pinned_[index] = true;
}

bool ConvexProgram::any_pinned() const {
  return std::any_of(pinned_.begin(), pinned_.end(), [](bool b) { return b; });
}

void ConvexProgram::remove_constraints_with_prefix(const std::string& prefix) {
  auto matches = [&](const std::string& label) {
    return label.rfind(prefix, 0) == 0;
  };
  std::erase_if(affine_, [&](const AffineConstraint& c) { return matches(c.label); });
  std::erase_if(socs_, [&](const SocConstraint& c) { return matches(c.label); });
  std::erase_if(logs_, [&](const LogConstraint& c) { return matches(c.label); });
}

Eigen::VectorXd ConvexProgram::slice(const std::string& name,
                                     const Eigen::VectorXd& x) const {
  if (x.size() != num_vars_) {
    throw std::invalid_argument("slice: assignment has the wrong length");
  }
  const auto [offset, count] = block(name);
  return x.segment(offset, count);
}

void ConvexProgram::validate() const {
  if (num_vars_ == 0) {
    throw std::invalid_argument("ConvexProgram: no variables declared");
  }
  if (objective_.coeffs.size() != num_vars_) {
    throw std::invalid_argument("ConvexProgram: objective not set");
  }
  for (const SocConstraint& s : socs_) {
    if (s.elements.empty() && s.bound.coeffs.lpNorm<1>() == 0.0) {
      throw std::invalid_argument("ConvexProgram: degenerate cone constraint '" +
                                  s.label + "'");
    }
  }
  if (hint_ && hint_->size() != num_vars_) {
    throw std::invalid_argument("ConvexProgram: start hint has the wrong length");
  }
}

// ---------------------------------------------------------------------------
// Public entry points.

FeasibilityReport feasibility_phase(const ConvexProgram& program) {
  program.validate();
  ReduceOutcome ro = reduce_program(program);
  FeasibilityReport rep;
  if (ro.constant_infeasible) {
    rep.feasible = false;
    rep.relaxation = std::numeric_limits<double>::infinity();
    rep.point = Eigen::VectorXd::Zero(program.num_variables());
    return rep;
  }
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(ro.reduced.n);
  if (program.start_hint()) x0 = select(*program.start_hint(), ro.active);
  const Phase1Result p1 = run_phase1(ro.reduced, x0, 400);
  rep.feasible = p1.feasible;
  rep.relaxation = p1.relaxation;
  rep.point = Eigen::VectorXd::Zero(program.num_variables());
  if (p1.feasible) {
    for (std::size_t i = 0; i < ro.active.size(); ++i) {
      rep.point[ro.active[i]] = p1.x[i];
    }
  }
  return rep;
}

Solution solve(const ConvexProgram& program, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
  if (max_iter <= 0) throw std::invalid_argument("solve: max_iter must be positive");
  program.validate();

  Solution sol;
  sol.x = Eigen::VectorXd::Zero(program.num_variables());

  ReduceOutcome ro = reduce_program(program);
  if (ro.constant_infeasible) {
    sol.status.state = SolveState::Infeasible;
    sol.status.message = ro.message;
    return sol;
  }
  Reduced& r = ro.reduced;

  auto finish = [&](SolveState state, const Eigen::VectorXd& x, double gap,
                    std::string message) {
    sol.status.state = state;
    sol.status.kkt_residual = gap;
    sol.status.message = std::move(message);
    for (std::size_t i = 0; i < ro.active.size(); ++i) {
      sol.x[ro.active[i]] = x[i];
    }
    sol.status.objective_value = program.objective().eval(sol.x);
    return sol;
  };

  if (r.n == 0) {
    return finish(SolveState::Optimal, Eigen::VectorXd(), 0.0, "");
  }

  // Start from the hint when it is strictly interior, else run phase 1.
  Eigen::VectorXd x;
  bool have_start = false;
  if (program.start_hint()) {
    Eigen::VectorXd cand = select(*program.start_hint(), ro.active);
    if (cand.allFinite() && min_slack(r, cand) > kDomainMargin) {
      x = cand;
      have_start = true;
    }
  }
  if (!have_start) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(r.n);
    if (program.start_hint()) {
      Eigen::VectorXd cand = select(*program.start_hint(), ro.active);
      if (cand.allFinite()) x0 = cand;
    }
    const Phase1Result p1 = run_phase1(r, x0, std::max(400, max_iter));
    if (!p1.solved) {
      return finish(SolveState::NumericalFailure, Eigen::VectorXd::Zero(r.n),
                    std::numeric_limits<double>::infinity(), p1.message);
    }
    if (!p1.feasible) {
      return finish(SolveState::Infeasible, Eigen::VectorXd::Zero(r.n),
                    std::numeric_limits<double>::infinity(), p1.message);
    }
    x = p1.x;
  }

  PathResult pr = follow_path(r, x, tol, max_iter);
  return finish(pr.state, x, pr.gap, pr.message);
}

}  // namespace rsfbl::convex
