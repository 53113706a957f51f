#pragma once

// Finite-blocklength achievable rates under the normal approximation:
//   R(G) = log2(1 + G) - d * sqrt(V(G)),   V(G) = 1 - (1 + G)^-2,
// where d = Q^-1(bler) / sqrt(blocklength) * log2(e) depends only on the
// block error target and the blocklength. R can be negative at low SINR;
// clamping happens only when rates are reported, never inside solvers.

#include <cstdint>

#include <Eigen/Dense>

#include "rsfbl/model.hpp"

namespace rsfbl {

/// Gaussian tail probability Q(x) = P[N(0,1) > x].
double q_function(double x);

/// Inverse of q_function on (0, 0.5): returns x >= 0 with Q(x) = eps.
/// Throws std::domain_error outside (0, 0.5).
double q_inverse(double eps);

/// Blocklength / block-error-rate pair with the cached penalty constant
/// d_const = Q^-1(bler)/sqrt(blocklength) * log2(e).
///
/// Blocklengths >= kInfiniteBlocklength are the documented
/// infinite-blocklength sentinel: d_const is 0 and rates reduce to
/// log2(1 + G) exactly. For finite blocklengths d_const > 0 and is
/// reproducible from (blocklength, bler) to full precision.
class FblParams {
 public:
  static constexpr std::uint64_t kInfiniteBlocklength = 1000000000000ULL;

  FblParams(std::uint64_t blocklength, double bler);
  static FblParams infinite(double bler);

  std::uint64_t blocklength() const { return blocklength_; }
  double bler() const { return bler_; }
  double d_const() const { return d_const_; }
  bool is_infinite() const { return blocklength_ >= kInfiniteBlocklength; }

 private:
  std::uint64_t blocklength_;
  double bler_;
  double d_const_;
};

/// SINR of the common stream at `user`: |h_k^H p_c|^2 over (all private
/// streams' received power + 1).
double sinr_common(const ChannelSet& channels, const Precoders& precoders,
                   int user);

/// SINR of `user`'s private stream after the common stream is removed:
/// |h_k^H p_k|^2 over (other users' private received power + 1).
double sinr_private(const ChannelSet& channels, const Precoders& precoders,
                    int user);

/// Channel dispersion V(G) = 1 - (1 + G)^-2. Requires gamma >= 0; lies in
/// [0, 1).
double dispersion(double gamma);

/// Penalty term d_const * sqrt(V(gamma)).
double dispersion_penalty(double gamma, const FblParams& params);

/// Normal-approximation rate log2(1 + gamma) - dispersion_penalty.
double fbl_rate(double gamma, const FblParams& params);

/// Exact rate bookkeeping for one (precoders, common-split) solution.
/// Rates are clamped at zero for reporting; `common_split_excess` keeps
/// the amount (if any) by which sum(common_split) exceeds the common rate
/// that every user can decode.
struct RateBreakdown {
  Eigen::VectorXd common_rates;    // per-user rate of the common stream, clamped
  Eigen::VectorXd private_rates;   // per-user private rate, clamped
  double common_rate_bound = 0.0;  // min over users of common_rates
  Eigen::VectorXd common_split;    // the split used for totals
  Eigen::VectorXd total_rates;     // common_split[k] + private_rates[k]
  double sum_rate = 0.0;
  double common_split_excess = 0.0;  // max(0, sum(split) - common_rate_bound)
};

/// Evaluates exact FBL rates for a candidate solution. Throws
/// std::invalid_argument if sizes are inconsistent, if any split entry is
/// below -1e-9, or if the precoder power exceeds the budget by more than
/// 1e-6 * max(1, P_t) (the message reports the excess).
RateBreakdown evaluate_solution(const ChannelSet& channels,
                                const Precoders& precoders,
                                const Eigen::VectorXd& common_split,
                                const FblParams& params,
                                const PowerBudget& budget);

}  // namespace rsfbl
