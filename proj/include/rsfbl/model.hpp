#pragma once

// Channel and transmit-side types for a multi-antenna downlink with
// unit-variance receiver noise. Because noise power is 1, the transmit
// power budget in linear scale doubles as the SNR.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rsfbl {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Immutable per-user channel vectors h_k (length = number of transmit
/// antennas). Throws std::invalid_argument on empty sets, size mismatches,
/// all-zero vectors, or non-finite entries.
class ChannelSet {
 public:
  ChannelSet(int num_tx_antennas, std::vector<CVector> channels);

  int num_tx_antennas() const { return num_tx_antennas_; }
  int num_users() const { return static_cast<int>(channels_.size()); }
  const CVector& channel(int user) const { return channels_.at(user); }
  const std::vector<CVector>& channels() const { return channels_; }

 private:
  int num_tx_antennas_;
  std::vector<CVector> channels_;
};

/// Total transmit power in linear scale (unit-variance noise).
class PowerBudget {
 public:
  explicit PowerBudget(double total_power);
  static PowerBudget from_snr_db(double snr_db);

  double total_power() const { return total_power_; }
  double snr_db() const { return snr_db_; }

 private:
  double total_power_;
  double snr_db_;
};

/// One common-stream precoder plus one private-stream precoder per user.
/// Plain aggregate; power-budget compliance is a property of solver
/// outputs, not of the type.
struct Precoders {
  CVector common;
  std::vector<CVector> private_streams;

  static Precoders zeros(int num_tx_antennas, int num_users);

  double common_power() const { return common.squaredNorm(); }
  double private_power(int user) const {
    return private_streams.at(user).squaredNorm();
  }
  double total_power() const;
  int num_users() const { return static_cast<int>(private_streams.size()); }
};

/// 10^(snr_db/10). With unit noise this is the power budget in linear scale.
double snr_db_to_power(double snr_db);

/// Two-user, four-antenna set: h_1 = [1,1,1,1], h_2 = gamma *
/// [1, e^{j theta}, e^{j 2 theta}, e^{j 3 theta}]. theta in [0, pi/2]
/// controls the angle between the users, gamma their gain imbalance.
ChannelSet structured_channels_underloaded(double theta, double gamma);

/// Four-user, two-antenna set: h_1 = [1,1] and h_{m+1} = gamma_m *
/// [1, e^{j theta_m}] with the coupled parameterization gamma_2 = 1,
/// gamma_3 = gamma_1, theta_2 = theta_1 + pi/9, theta_3 = theta_1 + theta_2.
ChannelSet structured_channels_overloaded(double theta1, double gamma1);

/// I.i.d. circularly-symmetric complex Gaussian channels; entry of user k
/// has variance variances[k] (real and imaginary parts each variance/2).
/// Deterministic for a fixed seed across platforms (explicit Box-Muller on
/// a fixed-width generator; no library distributions involved).
ChannelSet random_channels(int num_tx_antennas, int num_users,
                           const std::vector<double>& variances,
                           std::uint64_t seed);

}  // namespace rsfbl
