#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsfbl/convex.hpp"
#include "rsfbl/fbl_rate.hpp"
#include "rsfbl/model.hpp"
#include "rsfbl/scheme_kind.hpp"

namespace rsfbl {

// Successive convex approximation over precoders for the finite-blocklength
// sum-rate problem.  Each round linearizes the two non-convex ingredients at
// the current expansion point:
//
//  * the dispersion penalty d * sqrt(1 - (1+rho)^-2), replaced by its tangent
//    (an overestimator, so rates stay conservative), and
//  * the SINR numerator |h^H p|^2 / sigma, replaced by the first-order
//    expansion of the quadratic-over-linear form (an underestimator).
//
// The resulting subproblem is convex (affine, second-order cone, and
// logarithmic constraints) and is handed to the barrier solver.

// Tangent of the dispersion penalty at rho_anchor: value + slope*(rho-anchor).
struct DispersionTangent {
  double value = 0.0;
  double slope = 0.0;
  double anchor = 0.0;

  double at(double rho) const { return value + slope * (rho - anchor); }
};

// Requires rho_anchor >= rho_min unless d_const == 0 (then the tangent is
// identically zero and the anchor is irrelevant).
DispersionTangent linearize_dispersion(double rho_anchor, double d_const,
                                       double rho_min = 1e-3);

// First-order lower bound of |h^H p|^2 / sigma around (p_anchor, ipn_anchor):
//   t(p, sigma) = p_coeffs . [Re p; Im p] + sigma_coeff * sigma.
// Exact at the anchor, below the true value elsewhere (sigma > 0).
struct QuadOverLinTangent {
  Eigen::VectorXd p_coeffs;
  double sigma_coeff = 0.0;

  double at(const CVector& p, double sigma) const;
};

QuadOverLinTangent linearize_quadratic_over_linear(const CVector& p_anchor,
                                                   double ipn_anchor,
                                                   const CVector& h);

// Expansion point carried between SCA rounds: precoders plus the auxiliary
// SINR / interference-plus-noise anchors, one entry per user.
struct ExpansionPoint {
  Precoders precoders;
  Eigen::VectorXd common_sinr;
  Eigen::VectorXd private_sinr;
  Eigen::VectorXd common_ipn;
  Eigen::VectorXd private_ipn;

  // Checks the anchors of streams the scheme actually uses agree with the
  // precoders (entries sitting at the rho_min floor are exempt, since the
  // update rule floors them there on purpose).
  bool is_consistent(const ChannelSet& channels, const SchemeKind& scheme,
                     double rho_min, double rtol = 1e-6) const;
};

// Output of one converged SCA run.
struct SubSolution {
  Precoders precoders;
  Eigen::VectorXd common_split;        // per-user share of the common rate
  Eigen::VectorXd private_rate_bounds; // beta, may be negative at short blocklength
  double objective = 0.0;              // solver objective sum(C_k + beta_k)
  Eigen::VectorXd point;               // full subproblem variable vector
  Eigen::VectorXd common_sinr;
  Eigen::VectorXd private_sinr;
  Eigen::VectorXd common_ipn;
  Eigen::VectorXd private_ipn;
};

struct ScaResult {
  enum class Outcome { Converged, Infeasible, SolverFailure, IterationLimit };

  Outcome outcome = Outcome::SolverFailure;
  std::optional<SubSolution> solution;  // best iterate, when any round solved
  std::vector<double> trace;            // objective after each accepted round
  int iterations = 0;
  int failure_iteration = -1;          // round at which the solver gave up
  std::string message;
  std::vector<ExpansionPoint> history;  // filled only when keep_history is set

  bool converged() const { return outcome == Outcome::Converged; }
};

const char* to_string(ScaResult::Outcome o);

struct SolveOptions {
  double sca_tolerance = 1e-4;
  int max_sca_iterations = 200;
  double solver_tolerance = 1e-7;
  int max_newton_steps = 600;
  int restarts = 0;                 // extra randomized initializations
  std::uint64_t restart_seed = 1;
  bool disable_dispersion = false;  // force the asymptotic rate expression
  double rho_min = 1e-3;
  bool keep_history = false;
};

// Deterministic initialization: private streams use regularized zero-forcing
// directions, the common stream the normalized channel sum, with half the
// budget on the common stream and the rest split evenly.  Streams the scheme
// does not use carry zero power and floor anchors.
ExpansionPoint initial_point(const ChannelSet& channels,
                             const PowerBudget& budget,
                             const SchemeKind& scheme, double rho_min = 1e-3);

// Builds the convex subproblem around `point`.  Variable blocks: "pc" and
// "pp{k}" (stacked real/imaginary precoder parts), "C", "beta", "rho_c",
// "rho_p", "sigma_c", "sigma_p".  Streams the scheme does not use are pinned
// to zero and their constraints dropped.
convex::ConvexProgram build_subproblem(const ChannelSet& channels,
                                       const PowerBudget& budget,
                                       const FblParams& params,
                                       double qos_bits,
                                       const ExpansionPoint& point,
                                       const SchemeKind& scheme,
                                       const SolveOptions& options = {});

// Runs the SCA loop from the matched-filter start (plus `restarts` extra
// randomized starts, keeping the best converged run).
ScaResult sca_solve(const ChannelSet& channels, const PowerBudget& budget,
                    const FblParams& params, double qos_bits,
                    const SchemeKind& scheme, const SolveOptions& options = {});

// Exact (non-linearized) feasibility audit of a finished solution.
struct FeasibilityCheck {
  bool ok = true;
  double worst_violation = 0.0;
  std::string detail;
};

FeasibilityCheck verify_exact_feasibility(const ChannelSet& channels,
                                          const PowerBudget& budget,
                                          const FblParams& params,
                                          double qos_bits,
                                          const SchemeKind& scheme,
                                          const SubSolution& sub,
                                          double tol = 1e-5);

}  // namespace rsfbl
