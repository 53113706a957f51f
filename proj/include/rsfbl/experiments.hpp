#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "rsfbl/schemes.hpp"

namespace rsfbl {

// Deterministic blocklength sweeps over a channel scenario, with CSV output.

// Two co-located line-of-sight users, four transmit antennas; `gamma` scales
// the second user's gain and `theta_rad` the angular separation.
struct UnderloadedSpec {
  double theta_rad = 0.0;
  double gamma = 1.0;
};

// Four single-path users on two transmit antennas (more users than antennas).
struct OverloadedSpec {
  double theta1_rad = 0.0;
  double gamma1 = 1.0;
};

// Independent complex Gaussian channels; one variance per user.
struct RandomSpec {
  int num_tx_antennas = 4;
  int num_users = 2;
  std::vector<double> variances;
};

using ChannelSpec = std::variant<UnderloadedSpec, OverloadedSpec, RandomSpec>;

struct ScenarioConfig {
  std::string scenario_id;
  ChannelSpec channels = UnderloadedSpec{};
  double snr_db = 20.0;
  std::vector<std::uint64_t> blocklengths;
  std::vector<double> qos_bits;  // one entry per blocklength
  SchemeBlers blers;
  std::vector<std::string> schemes;  // from {rsma, sdma, noma, auto}
  double sca_tolerance = 1e-4;
  double solver_tolerance = 1e-7;
  int max_sca_iterations = 200;
  int restarts = 0;
  int num_draws = 1;
  std::uint64_t base_seed = 1;
  std::string output_csv;

  SolveOptions solve_options() const;
  ChannelSet make_channels(int draw_index) const;
};

// Parses the flat key=value format ('#' starts a comment).  Unknown keys,
// malformed lines and inconsistent field combinations raise
// std::invalid_argument with the offending line number.
ScenarioConfig load_config(std::istream& in);
ScenarioConfig load_config_file(const std::string& path);

// Ready-to-edit config text for a named scenario: "underloaded4x2",
// "overloaded2x4" or "random4x8".
std::string config_template(const std::string& scenario);
std::vector<std::string> template_names();

// Throughput floor used by the bundled configs ("r_th_bits = auto"): grows
// with blocklength and saturates at 0.3 bits per use from 2500 on.
double default_qos_bits(std::uint64_t blocklength);

// One solved (draw, blocklength, scheme) cell.
struct SweepRecord {
  std::string scenario_id;
  int channel_draw_index = 0;
  std::uint64_t blocklength = 0;
  std::string scheme;  // requested label, not the per-order variant
  std::string status;
  double sum_rate_objective = 0.0;  // optimizer objective, unclamped
  double sum_rate_evaluated = 0.0;  // achieved sum rate, rates clamped at zero
  std::vector<double> per_user_rates;
  double common_power = 0.0;
  std::vector<double> private_powers;
  double dispersion_penalty_common = 0.0;
  int sca_iterations = 0;
  double wall_time_s = 0.0;  // informational; excluded from determinism
};

std::vector<SweepRecord> run_sweep(const ScenarioConfig& config);

struct SummaryRow {
  std::uint64_t blocklength = 0;
  std::string scheme;
  double mean_sum_rate = 0.0;  // over converged records
  double std_sum_rate = 0.0;   // sample standard deviation, 0 when n <= 1
  int num_optimal = 0;
};

std::vector<SummaryRow> aggregate(const std::vector<SweepRecord>& records);

// Column order is fixed; floats use %.9g; list fields are ';' joined.
// The scheme column may also carry the reserved label "dpc_bound" for rows
// imported from an external capacity bound; this library never emits it.
void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
void write_csv_file(const std::string& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_records_csv(std::istream& in);
std::vector<SweepRecord> read_records_csv_file(const std::string& path);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_csv_file(const std::string& path,
                            const std::vector<SummaryRow>& rows);

}  // namespace rsfbl
