#include "rsfbl/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace rsfbl {

namespace {

bool finite(const CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
      return false;
    }
  }
  return true;
}

// Uniform in (0,1), identical on every platform for a given generator state.
double uniform01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

ChannelSet::ChannelSet(int num_tx_antennas, std::vector<CVector> channels)
    : num_tx_antennas_(num_tx_antennas), channels_(std::move(channels)) {
  if (num_tx_antennas_ < 1) {
    throw std::invalid_argument("ChannelSet: need at least one tx antenna");
  }
  if (channels_.empty()) {
    throw std::invalid_argument("ChannelSet: need at least one user");
  }
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    const CVector& h = channels_[k];
    if (h.size() != num_tx_antennas_) {
      throw std::invalid_argument(
          "ChannelSet: channel of user " + std::to_string(k) + " has length " +
          std::to_string(h.size()) + ", expected " +
          std::to_string(num_tx_antennas_));
    }
    if (!finite(h)) {
      throw std::invalid_argument("ChannelSet: non-finite entry in channel " +
                                  std::to_string(k));
    }
    if (h.norm() == 0.0) {
      throw std::invalid_argument("ChannelSet: channel of user " +
                                  std::to_string(k) + " is all-zero");
    }
  }
}

PowerBudget::PowerBudget(double total_power) : total_power_(total_power) {
  if (!std::isfinite(total_power) || total_power <= 0.0) {
    throw std::invalid_argument("PowerBudget: total power must be positive");
  }
  snr_db_ = 10.0 * std::log10(total_power);
}

PowerBudget PowerBudget::from_snr_db(double snr_db) {
  return PowerBudget(snr_db_to_power(snr_db));
}

Precoders Precoders::zeros(int num_tx_antennas, int num_users) {
  Precoders p;
  p.common = CVector::Zero(num_tx_antennas);
  p.private_streams.assign(num_users, CVector::Zero(num_tx_antennas));
  return p;
}

double Precoders::total_power() const {
  double sum = common.squaredNorm();
  for (const CVector& p : private_streams) sum += p.squaredNorm();
  return sum;
}

double snr_db_to_power(double snr_db) {
  if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("snr_db_to_power: non-finite SNR");
  }
  return std::pow(10.0, snr_db / 10.0);
}

ChannelSet structured_channels_underloaded(double theta, double gamma) {
  constexpr double kPi = 3.14159265358979323846;
  if (!(theta >= 0.0 && theta <= kPi / 2.0)) {
    throw std::domain_error("structured_channels_underloaded: theta must lie in [0, pi/2]");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::domain_error("structured_channels_underloaded: gamma must be a nonnegative real");
  }
  const int nt = 4;
  CVector h1(nt), h2(nt);
  for (int m = 0; m < nt; ++m) {
    h1[m] = Complex(1.0, 0.0);
    h2[m] = gamma * std::polar(1.0, m * theta);
  }
  return ChannelSet(nt, {h1, h2});
}

ChannelSet structured_channels_overloaded(double theta1, double gamma1) {
  if (!std::isfinite(theta1)) {
    throw std::domain_error("structured_channels_overloaded: theta1 must be finite");
  }
  if (!(gamma1 >= 0.0) || !std::isfinite(gamma1)) {
    throw std::domain_error("structured_channels_overloaded: gamma1 must be a nonnegative real");
  }
  const int nt = 2;
  // Coupled parameterization: the second pair of users reuses the first
  // pair's gain and a fixed pi/9 angular offset.
  const double theta2 = theta1 + 3.14159265358979323846 / 9.0;
  const double theta3 = theta1 + theta2;
  const double gammas[3] = {gamma1, 1.0, gamma1};
  const double thetas[3] = {theta1, theta2, theta3};

  std::vector<CVector> hs;
  CVector h1(nt);
  h1 << Complex(1, 0), Complex(1, 0);
  hs.push_back(h1);
  for (int m = 0; m < 3; ++m) {
    CVector h(nt);
    h << Complex(gammas[m], 0.0), gammas[m] * std::polar(1.0, thetas[m]);
    hs.push_back(h);
  }
  return ChannelSet(nt, hs);
}

ChannelSet random_channels(int num_tx_antennas, int num_users,
                           const std::vector<double>& variances,
                           std::uint64_t seed) {
  if (num_tx_antennas < 1 || num_users < 1) {
    throw std::invalid_argument("random_channels: dimensions must be positive");
  }
  if (static_cast<int>(variances.size()) != num_users) {
    throw std::invalid_argument(
        "random_channels: expected " + std::to_string(num_users) +
        " variances, got " + std::to_string(variances.size()));
  }
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("random_channels: variances must be positive");
    }
  }
  std::mt19937_64 gen(seed);
  std::vector<CVector> hs;
  hs.reserve(num_users);
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  for (int k = 0; k < num_users; ++k) {
    const double scale = std::sqrt(variances[k] / 2.0);
    CVector h(num_tx_antennas);
    for (int m = 0; m < num_tx_antennas; ++m) {
      // Box-Muller: one uniform pair -> one complex Gaussian entry.
      const double u1 = uniform01(gen);
      const double u2 = uniform01(gen);
      const double r = std::sqrt(-2.0 * std::log(u1));
      h[m] = Complex(scale * r * std::cos(kTwoPi * u2),
                     scale * r * std::sin(kTwoPi * u2));
    }
    hs.push_back(h);
  }
  return ChannelSet(num_tx_antennas, hs);
}

}  // namespace rsfbl
