#include "rsfbl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rsfbl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, int line, const std::string& key) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    fail_line(line, "field '" + key + "' expects a finite number, got '" + t + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, int line, const std::string& key) {
  const std::string t = trim(s);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
    fail_line(line, "field '" + key + "' expects a non-negative integer, got '" + t + "'");
  }
  return std::strtoull(t.c_str(), nullptr, 10);
}

int parse_int(const std::string& s, int line, const std::string& key) {
  const std::uint64_t v = parse_u64(s, line, key);
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    fail_line(line, "field '" + key + "' is too large");
  }
  return static_cast<int>(v);
}

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt_g(v[i]);
  }
  return out;
}

const char* kRecordHeader =
    "scenario_id,channel_draw_index,blocklength,scheme,status,"
    "sum_rate_objective,sum_rate_evaluated,per_user_rates,common_power,"
    "private_powers,dispersion_penalty_common,sca_iterations,wall_time_s";

const char* kSummaryHeader =
    "blocklength,scheme,mean_sum_rate,std_sum_rate,num_optimal";

int spec_num_users(const ChannelSpec& spec) {
  if (std::holds_alternative<UnderloadedSpec>(spec)) return 2;
  if (std::holds_alternative<OverloadedSpec>(spec)) return 4;
  return std::get<RandomSpec>(spec).num_users;
}

void fill_record(SweepRecord& rec, const ChannelSet& ch, const PowerBudget& budget,
                 const SchemeKind& scheme, const ScaResult& res,
                 const FblParams& params) {
  const int K = ch.num_users();
  rec.status = to_string(res.outcome);
  rec.sca_iterations = res.iterations;
  rec.per_user_rates.assign(K, 0.0);
  rec.private_powers.assign(K, 0.0);
  if (!res.solution) return;
  const SubSolution& s = *res.solution;
  rec.sum_rate_objective = s.objective;
  const RateBreakdown rb =
      evaluate_solution(ch, s.precoders, s.common_split, params, budget);
  rec.sum_rate_evaluated = rb.sum_rate;
  for (int k = 0; k < K; ++k) {
    rec.per_user_rates[k] = rb.total_rates[k];
    rec.private_powers[k] = s.precoders.private_power(k);
  }
  rec.common_power = s.precoders.common_power();
  if (scheme.uses_common_stream()) {
    double g = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) g = std::min(g, sinr_common(ch, s.precoders, k));
    rec.dispersion_penalty_common = dispersion_penalty(g, params);
  }
}

}  // namespace

SolveOptions ScenarioConfig::solve_options() const {
  SolveOptions opts;
  opts.sca_tolerance = sca_tolerance;
  opts.solver_tolerance = solver_tolerance;
  opts.max_sca_iterations = max_sca_iterations;
  opts.restarts = restarts;
  opts.restart_seed = base_seed + 1000003;  // decoupled from the channel seeds
  return opts;
}

ChannelSet ScenarioConfig::make_channels(int draw_index) const {
  if (const auto* u = std::get_if<UnderloadedSpec>(&channels)) {
    return structured_channels_underloaded(u->theta_rad, u->gamma);
  }
  if (const auto* o = std::get_if<OverloadedSpec>(&channels)) {
    return structured_channels_overloaded(o->theta1_rad, o->gamma1);
  }
  const auto& r = std::get<RandomSpec>(channels);
  const std::vector<double> variances =
      r.variances.empty() ? std::vector<double>(r.num_users, 1.0) : r.variances;
  return random_channels(r.num_tx_antennas, r.num_users, variances,
                         base_seed + static_cast<std::uint64_t>(draw_index));
}

double default_qos_bits(std::uint64_t blocklength) {
  static const double schedule[25] = {
      0.01, 0.1,  0.15,  0.17,  0.19,  0.21,  0.23,  0.24,  0.245,
      0.25, 0.255, 0.26, 0.265, 0.27,  0.273, 0.276, 0.279, 0.282,
      0.285, 0.288, 0.291, 0.294, 0.297, 0.298, 0.3};
  if (blocklength <= 100) return schedule[0];
  if (blocklength >= 2500) return schedule[24];
  return schedule[blocklength / 100 - 1];
}

ScenarioConfig load_config(std::istream& in) {
  std::map<std::string, std::pair<std::string, int>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_line(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail_line(lineno, "empty key");
    if (kv.count(key)) fail_line(lineno, "duplicate key '" + key + "'");
    kv[key] = {val, lineno};
  }

  static const std::set<std::string> known = {
      "scenario_id", "channel_kind", "theta_rad", "gamma", "theta1_rad",
      "gamma1", "num_tx_antennas", "num_users", "variances_sq", "snr_db",
      "blocklengths", "r_th_bits", "bler_rsma", "bler_noma", "bler_sdma",
      "schemes", "sca_tolerance", "solver_tolerance", "max_sca_iterations",
      "restarts", "num_draws", "base_seed", "output_csv"};
  for (const auto& [key, vl] : kv) {
    if (!known.count(key)) fail_line(vl.second, "unknown key '" + key + "'");
  }

  auto has = [&](const std::string& k) { return kv.count(k) != 0; };
  auto raw = [&](const std::string& k) -> const std::string& { return kv.at(k).first; };
  auto lineof = [&](const std::string& k) { return kv.at(k).second; };
  auto require = [&](const std::string& k) -> const std::string& {
    if (!has(k)) throw std::invalid_argument("config: missing required key '" + k + "'");
    return raw(k);
  };

  ScenarioConfig cfg;
  cfg.scenario_id = require("scenario_id");
  const std::string kind = require("channel_kind");

  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (has(k)) {
        fail_line(lineof(k), std::string("field '") + k +
                                 "' does not apply to channel_kind " + kind);
      }
    }
  };
  if (kind == "underloaded4x2") {
    forbid({"theta1_rad", "gamma1", "num_tx_antennas", "num_users", "variances_sq"});
    UnderloadedSpec u;
    u.theta_rad = parse_double(require("theta_rad"), lineof("theta_rad"), "theta_rad");
    u.gamma = has("gamma") ? parse_double(raw("gamma"), lineof("gamma"), "gamma") : 1.0;
    cfg.channels = u;
  } else if (kind == "overloaded2x4") {
    forbid({"theta_rad", "gamma", "num_tx_antennas", "num_users", "variances_sq"});
    OverloadedSpec o;
    if (has("theta1_rad")) {
      o.theta1_rad = parse_double(raw("theta1_rad"), lineof("theta1_rad"), "theta1_rad");
    }
    if (has("gamma1")) o.gamma1 = parse_double(raw("gamma1"), lineof("gamma1"), "gamma1");
    cfg.channels = o;
  } else if (kind == "random") {
    forbid({"theta_rad", "gamma", "theta1_rad", "gamma1"});
    RandomSpec r;
    r.num_tx_antennas =
        parse_int(require("num_tx_antennas"), lineof("num_tx_antennas"), "num_tx_antennas");
    r.num_users = parse_int(require("num_users"), lineof("num_users"), "num_users");
    if (r.num_tx_antennas < 1 || r.num_users < 1) {
      fail_line(lineof("num_users"), "antenna and user counts must be positive");
    }
    if (has("variances_sq")) {
      const int line = lineof("variances_sq");
      for (const std::string& piece : split(raw("variances_sq"), ';')) {
        const double v = parse_double(piece, line, "variances_sq");
        if (!(v > 0.0)) fail_line(line, "variances_sq entries must be positive");
        r.variances.push_back(v);
      }
      if (r.variances.size() == 1) {
        r.variances.assign(r.num_users, r.variances[0]);
      }
      if (static_cast<int>(r.variances.size()) != r.num_users) {
        fail_line(line, "variances_sq must have one entry per user");
      }
    }
    cfg.channels = r;
  } else {
    fail_line(lineof("channel_kind"), "unknown channel_kind '" + kind + "'");
  }

  {
    const int line = lineof("blocklengths");
    for (const std::string& piece : split(require("blocklengths"), ';')) {
      const std::uint64_t l = parse_u64(piece, line, "blocklengths");
      if (l == 0) fail_line(line, "blocklengths entries must be positive");
      cfg.blocklengths.push_back(l);
    }
  }
  {
    const std::string& val = require("r_th_bits");
    const int line = lineof("r_th_bits");
    if (trim(val) == "auto") {
      for (std::uint64_t l : cfg.blocklengths) {
        cfg.qos_bits.push_back(default_qos_bits(l));
      }
    } else {
      for (const std::string& piece : split(val, ';')) {
        const double v = parse_double(piece, line, "r_th_bits");
        if (v < 0.0) fail_line(line, "r_th_bits entries must be non-negative");
        cfg.qos_bits.push_back(v);
      }
      if (cfg.qos_bits.size() == 1) {
        cfg.qos_bits.assign(cfg.blocklengths.size(), cfg.qos_bits[0]);
      }
      if (cfg.qos_bits.size() != cfg.blocklengths.size()) {
        fail_line(line, "r_th_bits must have one entry per blocklength");
      }
    }
  }

  if (has("snr_db")) cfg.snr_db = parse_double(raw("snr_db"), lineof("snr_db"), "snr_db");
  auto bler = [&](const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const double v = parse_double(raw(key), lineof(key), key);
    if (!(v > 0.0 && v < 0.5)) fail_line(lineof(key), key + " must lie in (0, 0.5)");
    return v;
  };
  cfg.blers.rsma = bler("bler_rsma", cfg.blers.rsma);
  cfg.blers.noma = bler("bler_noma", cfg.blers.noma);
  cfg.blers.sdma = bler("bler_sdma", cfg.blers.sdma);

  const int num_users = spec_num_users(cfg.channels);
  if (has("schemes")) {
    const int line = lineof("schemes");
    for (const std::string& piece : split(raw("schemes"), ';')) {
      const std::string s = trim(piece);
      if (s != "rsma" && s != "sdma" && s != "noma" && s != "auto") {
        fail_line(line, "unknown scheme '" + s + "'");
      }
      if (s == "noma" && num_users != 2) {
        fail_line(line, "scheme 'noma' needs exactly two users");
      }
      cfg.schemes.push_back(s);
    }
  } else {
    cfg.schemes = {"rsma", "sdma"};
    if (num_users == 2) cfg.schemes.push_back("noma");
  }

  if (has("sca_tolerance")) {
    cfg.sca_tolerance = parse_double(raw("sca_tolerance"), lineof("sca_tolerance"),
                                     "sca_tolerance");
    if (!(cfg.sca_tolerance > 0.0)) fail_line(lineof("sca_tolerance"), "must be positive");
  }
  if (has("solver_tolerance")) {
    cfg.solver_tolerance = parse_double(raw("solver_tolerance"),
                                        lineof("solver_tolerance"), "solver_tolerance");
    if (!(cfg.solver_tolerance > 0.0)) {
      fail_line(lineof("solver_tolerance"), "must be positive");
    }
  }
  if (has("max_sca_iterations")) {
    cfg.max_sca_iterations = parse_int(raw("max_sca_iterations"),
                                       lineof("max_sca_iterations"), "max_sca_iterations");
    if (cfg.max_sca_iterations <= 0) {
      fail_line(lineof("max_sca_iterations"), "must be positive");
    }
  }
  if (has("restarts")) {
    cfg.restarts = parse_int(raw("restarts"), lineof("restarts"), "restarts");
  }
  if (has("num_draws")) {
    cfg.num_draws = parse_int(raw("num_draws"), lineof("num_draws"), "num_draws");
    if (cfg.num_draws <= 0) fail_line(lineof("num_draws"), "must be positive");
  }
  if (has("base_seed")) {
    cfg.base_seed = parse_u64(raw("base_seed"), lineof("base_seed"), "base_seed");
  }
  if (has("output_csv")) cfg.output_csv = raw("output_csv");
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return load_config(in);
}

std::vector<std::string> template_names() {
  return {"underloaded4x2", "overloaded2x4", "random4x8"};
}

std::string config_template(const std::string& scenario) {
  if (scenario == "underloaded4x2") {
    return
        "# Two line-of-sight users on four transmit antennas.\n"
        "scenario_id = underloaded4x2\n"
        "channel_kind = underloaded4x2\n"
        "theta_rad = 0.3490658503988659  # pi/9 angular separation\n"
        "gamma = 1.0\n"
        "snr_db = 20\n"
        "blocklengths = 100;200;300;400;500;1000;1500;2000;2500\n"
        "r_th_bits = auto\n"
        "bler_rsma = 5e-6\n"
        "bler_noma = 5e-6\n"
        "bler_sdma = 1e-5\n"
        "schemes = rsma;sdma;noma\n"
        "sca_tolerance = 1e-4\n"
        "solver_tolerance = 1e-7\n"
        "max_sca_iterations = 200\n"
        "restarts = 0\n"
        "num_draws = 1\n"
        "base_seed = 1\n"
        "output_csv = underloaded4x2.csv\n";
  }
  if (scenario == "overloaded2x4") {
    return
        "# Four single-path users on two transmit antennas.\n"
        "scenario_id = overloaded2x4\n"
        "channel_kind = overloaded2x4\n"
        "theta1_rad = 0\n"
        "gamma1 = 0.3\n"
        "snr_db = 20\n"
        "blocklengths = 500;1000;1500;2000;2500;1000000000000\n"
        "r_th_bits = auto\n"
        "schemes = rsma;sdma\n"
        "sca_tolerance = 1e-4\n"
        "num_draws = 1\n"
        "base_seed = 1\n"
        "output_csv = overloaded2x4.csv\n";
  }
  if (scenario == "random4x8") {
    return
        "# Eight Rayleigh users on four transmit antennas, averaged over draws.\n"
        "scenario_id = random4x8\n"
        "channel_kind = random\n"
        "num_tx_antennas = 4\n"
        "num_users = 8\n"
        "variances_sq = 1;0.875;0.75;0.625;0.5;0.375;0.25;0.125\n"
        "snr_db = 20\n"
        "blocklengths = 300;2500\n"
        "r_th_bits = 0.2\n"
        "schemes = rsma;sdma\n"
        "num_draws = 10\n"
        "base_seed = 7\n"
        "output_csv = random4x8.csv\n";
  }
  throw std::invalid_argument("unknown template '" + scenario +
                              "'; available: underloaded4x2, overloaded2x4, random4x8");
}

std::vector<SweepRecord> run_sweep(const ScenarioConfig& cfg) {
  std::vector<SweepRecord> records;
  const PowerBudget budget = PowerBudget::from_snr_db(cfg.snr_db);
  const SolveOptions opts = cfg.solve_options();

  for (int draw = 0; draw < cfg.num_draws; ++draw) {
    const ChannelSet ch = cfg.make_channels(draw);
    const int K = ch.num_users();
    for (std::size_t bi = 0; bi < cfg.blocklengths.size(); ++bi) {
      const std::uint64_t l = cfg.blocklengths[bi];
      const double qos = cfg.qos_bits[bi];
      for (const std::string& label : cfg.schemes) {
        const auto t0 = std::chrono::steady_clock::now();
        SweepRecord rec;
        rec.scenario_id = cfg.scenario_id;
        rec.channel_draw_index = draw;
        rec.blocklength = l;
        rec.scheme = label;
        rec.per_user_rates.assign(K, 0.0);
        rec.private_powers.assign(K, 0.0);

        if (label == "auto") {
          const BestOfReport rep = solve_best(ch, budget, l, qos, opts, cfg.blers);
          if (rep.has_winner()) {
            fill_record(rec, ch, budget, rep.winner(), rep.selected(),
                        per_scheme_params(l, rep.winner(), cfg.blers));
          } else {
            rec.status = to_string(rep.per_scheme.front().second.outcome);
            rec.sca_iterations = rep.per_scheme.front().second.iterations;
          }
        } else if (label == "noma") {
          const SchemeKind orders[2] = {SchemeKind::noma(0, 1), SchemeKind::noma(1, 0)};
          const SweepRecord base = rec;
          bool have = false;
          for (const SchemeKind& sk : orders) {
            const FblParams params = per_scheme_params(l, sk, cfg.blers);
            const ScaResult res = sca_solve(ch, budget, params, qos, sk, opts);
            const bool usable = res.converged() && res.solution.has_value();
            const bool better =
                !have ||
                (usable && (rec.status != "converged" ||
                            res.solution->objective > rec.sum_rate_objective));
            if (better) {
              SweepRecord cand = base;
              fill_record(cand, ch, budget, sk, res, params);
              rec = std::move(cand);
              have = true;
            }
          }
        } else {
          const SchemeKind sk =
              label == "rsma" ? SchemeKind::incomplete_rsma() : SchemeKind::sdma();
          const FblParams params = per_scheme_params(l, sk, cfg.blers);
          const ScaResult res = sca_solve(ch, budget, params, qos, sk, opts);
          fill_record(rec, ch, budget, sk, res, params);
        }

        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

std::vector<SummaryRow> aggregate(const std::vector<SweepRecord>& records) {
  std::map<std::pair<std::uint64_t, std::string>, std::vector<double>> groups;
  for (const SweepRecord& rec : records) {
    auto& bucket = groups[{rec.blocklength, rec.scheme}];
    if (rec.status == "converged") bucket.push_back(rec.sum_rate_evaluated);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, vals] : groups) {
    SummaryRow row;
    row.blocklength = key.first;
    row.scheme = key.second;
    row.num_optimal = static_cast<int>(vals.size());
    if (!vals.empty()) {
      double sum = 0.0;
      for (double v : vals) sum += v;
      row.mean_sum_rate = sum / vals.size();
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - row.mean_sum_rate) * (v - row.mean_sum_rate);
        row.std_sum_rate = std::sqrt(ss / (vals.size() - 1));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kRecordHeader << "\n";
  for (const SweepRecord& r : records) {
    out << r.scenario_id << ',' << r.channel_draw_index << ',' << r.blocklength
        << ',' << r.scheme << ',' << r.status << ',' << fmt_g(r.sum_rate_objective)
        << ',' << fmt_g(r.sum_rate_evaluated) << ',' << join_list(r.per_user_rates)
        << ',' << fmt_g(r.common_power) << ',' << join_list(r.private_powers) << ','
        << fmt_g(r.dispersion_penalty_common) << ',' << r.sca_iterations << ','
        << fmt_g(r.wall_time_s) << "\n";
  }
}

void write_csv_file(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(out, records);
}

std::vector<SweepRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kRecordHeader) {
    throw std::invalid_argument("records CSV: missing or unexpected header");
  }
  std::vector<SweepRecord> records;
  int lineno = 1;
  auto parse_list = [](const std::string& s) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const std::string& piece : split(s, ';')) {
      out.push_back(std::strtod(piece.c_str(), nullptr));
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 13) {
      throw std::invalid_argument("records CSV line " + std::to_string(lineno) +
                                  ": expected 13 fields, got " +
                                  std::to_string(f.size()));
    }
    SweepRecord r;
    r.scenario_id = f[0];
    r.channel_draw_index = parse_int(f[1], lineno, "channel_draw_index");
    r.blocklength = parse_u64(f[2], lineno, "blocklength");
    r.scheme = f[3];
    r.status = f[4];
    r.sum_rate_objective = parse_double(f[5], lineno, "sum_rate_objective");
    r.sum_rate_evaluated = parse_double(f[6], lineno, "sum_rate_evaluated");
    r.per_user_rates = parse_list(f[7]);
    r.common_power = parse_double(f[8], lineno, "common_power");
    r.private_powers = parse_list(f[9]);
    r.dispersion_penalty_common = parse_double(f[10], lineno, "dispersion_penalty_common");
    r.sca_iterations = parse_int(f[11], lineno, "sca_iterations");
    r.wall_time_s = parse_double(f[12], lineno, "wall_time_s");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SweepRecord> read_records_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open records CSV '" + path + "'");
  return read_records_csv(in);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << "\n";
  for (const SummaryRow& r : rows) {
    out << r.blocklength << ',' << r.scheme << ',' << fmt_g(r.mean_sum_rate) << ','
        << fmt_g(r.std_sum_rate) << ',' << r.num_optimal << "\n";
  }
}

void write_summary_csv_file(const std::string& path,
                            const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_summary_csv(out, rows);
}

}  // namespace rsfbl
