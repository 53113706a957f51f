#include "rsfbl/fbl_rate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsfbl {

namespace {

constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double q_inverse(double eps) {
  if (!(eps > 0.0) || !(eps < 0.5)) {
    throw std::domain_error("q_inverse: argument must lie in (0, 0.5)");
  }
  // Bisect to a short bracket, then polish with Newton on Q(x) - eps
  // (derivative -pdf(x); well conditioned on the whole domain).
  double lo = 0.0, hi = 45.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > eps) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-6) break;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double err = q_function(x) - eps;
    const double deriv = -std_normal_pdf(x);
    if (deriv == 0.0) break;
    const double step = err / deriv;
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

FblParams::FblParams(std::uint64_t blocklength, double bler)
    : blocklength_(blocklength), bler_(bler) {
  if (blocklength_ == 0) {
    throw std::invalid_argument("FblParams: blocklength must be positive");
  }
  if (!(bler > 0.0) || !(bler < 0.5)) {
    throw std::invalid_argument("FblParams: bler must lie in (0, 0.5)");
  }
  d_const_ = is_infinite() ? 0.0
                           : q_inverse(bler) /
                                 std::sqrt(static_cast<double>(blocklength_)) *
                                 kLog2E;
}

FblParams FblParams::infinite(double bler) {
  return FblParams(kInfiniteBlocklength, bler);
}

namespace {

double received_power(const CVector& h, const CVector& p) {
  const Complex inner = h.adjoint() * p;
  return std::norm(inner);
}

}  // namespace

double sinr_common(const ChannelSet& channels, const Precoders& precoders,
                   int user) {
  const CVector& h = channels.channel(user);
  double interference = 1.0;
  for (const CVector& p : precoders.private_streams) {
    interference += received_power(h, p);
  }
  return received_power(h, precoders.common) / interference;
}

double sinr_private(const ChannelSet& channels, const Precoders& precoders,
                    int user) {
  const CVector& h = channels.channel(user);
  double interference = 1.0;
  for (int j = 0; j < precoders.num_users(); ++j) {
    if (j == user) continue;
    interference += received_power(h, precoders.private_streams[j]);
  }
  return received_power(h, precoders.private_streams.at(user)) / interference;
}

double dispersion(double gamma) {
  const double one_plus = 1.0 + gamma;
  return 1.0 - 1.0 / (one_plus * one_plus);
}

double dispersion_penalty(double gamma, const FblParams& params) {
  return params.d_const() * std::sqrt(dispersion(gamma));
}

double fbl_rate(double gamma, const FblParams& params) {
  return std::log2(1.0 + gamma) - dispersion_penalty(gamma, params);
}

RateBreakdown evaluate_solution(const ChannelSet& channels,
                                const Precoders& precoders,
                                const Eigen::VectorXd& common_split,
                                const FblParams& params,
                                const PowerBudget& budget) {
  const int k_users = channels.num_users();
  if (precoders.num_users() != k_users) {
    throw std::invalid_argument("evaluate_solution: precoders cover " +
                                std::to_string(precoders.num_users()) +
                                " users, channels " + std::to_string(k_users));
  }
  if (precoders.common.size() != channels.num_tx_antennas()) {
    throw std::invalid_argument("evaluate_solution: precoder length mismatch");
  }
  if (common_split.size() != k_users) {
    throw std::invalid_argument("evaluate_solution: common split needs one entry per user");
  }
  for (int k = 0; k < k_users; ++k) {
    if (common_split[k] < -1e-9) {
      throw std::invalid_argument(
          "evaluate_solution: negative common-rate share for user " +
          std::to_string(k));
    }
  }
  const double power = precoders.total_power();
  const double excess = power - budget.total_power();
  if (excess > 1e-6 * std::max(1.0, budget.total_power())) {
    throw std::invalid_argument(
        "evaluate_solution: precoder power exceeds the budget by " +
        std::to_string(excess));
  }

  RateBreakdown out;
  out.common_rates.resize(k_users);
  out.private_rates.resize(k_users);
  out.total_rates.resize(k_users);
  out.common_split = common_split.cwiseMax(0.0);
  for (int k = 0; k < k_users; ++k) {
    out.common_rates[k] =
        std::max(0.0, fbl_rate(sinr_common(channels, precoders, k), params));
    out.private_rates[k] =
        std::max(0.0, fbl_rate(sinr_private(channels, precoders, k), params));
    out.total_rates[k] = out.common_split[k] + out.private_rates[k];
  }
  out.common_rate_bound = out.common_rates.minCoeff();
  out.sum_rate = out.total_rates.sum();
  out.common_split_excess =
      std::max(0.0, out.common_split.sum() - out.common_rate_bound);
  return out;
}

}  // namespace rsfbl
