#include "rsfbl/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "rsfbl/schemes.hpp"

namespace rsfbl {

namespace {

constexpr double kLog2E = 1.4426950408889634074;

// Real stacking of complex precoders: x = [Re p; Im p].
Eigen::VectorXd stack(const CVector& p) {
  Eigen::VectorXd x(2 * p.size());
  x.head(p.size()) = p.real();
  x.tail(p.size()) = p.imag();
  return x;
}

CVector unstack(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() / 2;
  CVector p(n);
  p.real() = x.head(n);
  p.imag() = x.tail(n);
  return p;
}

// With u = [Re h; Im h] and v = [-Im h; Re h]:
//   u . stack(p) = Re(h^H p),  v . stack(p) = Im(h^H p).
Eigen::VectorXd re_row(const CVector& h) {
  Eigen::VectorXd u(2 * h.size());
  u.head(h.size()) = h.real();
  u.tail(h.size()) = h.imag();
  return u;
}

Eigen::VectorXd im_row(const CVector& h) {
  Eigen::VectorXd v(2 * h.size());
  v.head(h.size()) = -h.imag();
  v.tail(h.size()) = h.real();
  return v;
}

double received_power(const CVector& h, const CVector& p) {
  return std::norm(Complex(h.adjoint() * p));
}

std::string pp_name(int k) { return "pp" + std::to_string(k); }

// Interference-plus-noise terms at given precoders (unit noise).
double common_ipn_at(const ChannelSet& ch, const Precoders& P, int k) {
  double s = 1.0;
  for (int j = 0; j < ch.num_users(); ++j) {
    s += received_power(ch.channel(k), P.private_streams[j]);
  }
  return s;
}

double private_ipn_at(const ChannelSet& ch, const Precoders& P, int k) {
  double s = 1.0;
  for (int j = 0; j < ch.num_users(); ++j) {
    if (j == k) continue;
    s += received_power(ch.channel(k), P.private_streams[j]);
  }
  return s;
}

// Regularized zero-forcing directions, one per user.  Plain matched filters
// drown each other in interference once users outnumber antennas.
std::vector<CVector> rzf_directions(const ChannelSet& ch, double Pt) {
  const int Nt = ch.num_tx_antennas();
  const int K = ch.num_users();
  Eigen::MatrixXcd gram = (K / Pt) * Eigen::MatrixXcd::Identity(Nt, Nt);
  for (int k = 0; k < K; ++k) {
    gram += ch.channel(k) * ch.channel(k).adjoint();
  }
  const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  std::vector<CVector> dirs(K);
  for (int k = 0; k < K; ++k) {
    const CVector d = llt.solve(ch.channel(k));
    const double nrm = d.norm();
    dirs[k] =
        nrm > 1e-12 ? CVector(d / nrm) : CVector(ch.channel(k).normalized());
  }
  return dirs;
}

// Smallest SINR whose normal-approximation rate reaches `rate`.  The rate
// dips below zero at low SINR before growing, so the search starts past the
// dip; d == 0 reduces to 2^rate - 1.
// Largest tangented rate an anchor at SINR rho leaves reachable: the
// dispersion tangent is a majorant, so the subproblem can raise the stream's
// rate up to this value in one round.  Anchors only need enough reach for the
// active floor; chasing the floor SINR itself at the anchor wastes power.
double tangent_reach(double rho, double d) {
  if (d <= 0.0) return std::numeric_limits<double>::infinity();
  if (rho <= 0.0) return 0.0;
  constexpr double kLog2e = 1.4426950408889634;
  const double ip = 1.0 + rho;
  const double V = 1.0 - 1.0 / (ip * ip);
  const double A = d * std::sqrt(V);
  const double B = d / (ip * ip * ip * std::sqrt(V));
  double best = -A + B * rho;
  if (B < kLog2e) {
    const double t = kLog2e / B - 1.0;
    best = std::max(best, std::log2(1.0 + t) - A - B * (t - rho));
  }
  return best;
}

double sinr_clearing(double rate, double d) {
  if (d <= 0.0) return std::exp2(std::max(rate, 0.0)) - 1.0;
  const auto f = [&](double g) {
    const double ip = 1.0 + g;
    return std::log2(ip) - d * std::sqrt(1.0 - 1.0 / (ip * ip));
  };
  double dip = 0.0, fdip = 0.0;
  for (double g = 1e-6; g < 1.0; g *= 2.0) {
    const double fg = f(g);
    if (fg < fdip) {
      dip = g;
      fdip = fg;
    }
  }
  double lo = dip;
  double hi = std::max(1.0, 2.0 * dip);
  while (f(hi) < rate) hi *= 2.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < rate ? lo : hi) = mid;
  }
  return hi;
}

ExpansionPoint anchors_from(const ChannelSet& ch, Precoders P,
                            const SchemeKind& scheme, double rho_min) {
  const int K = ch.num_users();
  ExpansionPoint pt;
  pt.common_sinr.resize(K);
  pt.private_sinr.resize(K);
  pt.common_ipn.resize(K);
  pt.private_ipn.resize(K);
  for (int k = 0; k < K; ++k) {
    pt.common_ipn[k] = common_ipn_at(ch, P, k);
    pt.private_ipn[k] = private_ipn_at(ch, P, k);
    if (scheme.uses_common_stream()) {
      pt.common_sinr[k] = std::max(
          received_power(ch.channel(k), P.common) / pt.common_ipn[k], rho_min);
    } else {
      pt.common_sinr[k] = rho_min;
    }
    if (scheme.private_stream_active(k)) {
      pt.private_sinr[k] = std::max(
          received_power(ch.channel(k), P.private_streams[k]) / pt.private_ipn[k],
          rho_min);
    } else {
      pt.private_sinr[k] = rho_min;
    }
  }
  pt.precoders = std::move(P);
  return pt;
}

// Zero-forcing start restricted to the best user subset.  With more users
// than antennas, spreading power over everyone starts the ascent in a basin
// where no stream is strong; the high-sum-rate configurations serve a subset
// of at most Nt users on near-interference-free beams and let the rate floors
// bring the rest back in later.  Exhaustive over subsets: K choose Nt stays
// tiny for the system sizes this library targets.
struct ZfSubset {
  std::vector<int> users;
  std::vector<CVector> beams;
};

ZfSubset best_zf_subset(const ChannelSet& ch, const PowerBudget& budget,
                        const SchemeKind& scheme) {
  const int Nt = ch.num_tx_antennas();
  const int K = ch.num_users();
  const double Pt = budget.total_power();
  std::vector<int> active;
  for (int k = 0; k < K; ++k) {
    if (scheme.private_stream_active(k)) active.push_back(k);
  }
  const double p_priv = scheme.uses_common_stream() ? 0.5 * Pt : Pt;

  ZfSubset best;
  double best_score = -std::numeric_limits<double>::infinity();
  const int max_m = std::min<int>(Nt, static_cast<int>(active.size()));
  std::vector<int> subset;
  const auto score_subset = [&]() {
    const int m = static_cast<int>(subset.size());
    Eigen::MatrixXcd H(Nt, m);
    for (int i = 0; i < m; ++i) H.col(i) = ch.channel(subset[i]);
    const Eigen::MatrixXcd gram =
        H.adjoint() * H +
        1e-12 * H.squaredNorm() * Eigen::MatrixXcd::Identity(m, m);
    const Eigen::MatrixXcd W = gram.llt().solve(H.adjoint()).adjoint();
    double score = 0.0;
    std::vector<CVector> beams(m);
    for (int i = 0; i < m; ++i) {
      const double nrm = W.col(i).norm();
      if (!(nrm > 1e-12)) return;
      beams[i] = CVector(W.col(i) / nrm);
      const double g = received_power(ch.channel(subset[i]), beams[i]);
      score += std::log2(1.0 + (p_priv / m) * g);
    }
    if (score > best_score) {
      best_score = score;
      best.users = subset;
      best.beams = std::move(beams);
    }
  };
  const auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (!subset.empty()) score_subset();
    if (static_cast<int>(subset.size()) == max_m) return;
    for (std::size_t i = next; i < active.size(); ++i) {
      subset.push_back(active[i]);
      self(self, i + 1);
      subset.pop_back();
    }
  };
  recurse(recurse, 0);
  return best;
}

Precoders subset_zf_precoders(const ChannelSet& ch, const PowerBudget& budget,
                              const SchemeKind& scheme) {
  const int Nt = ch.num_tx_antennas();
  const int K = ch.num_users();
  const double Pt = budget.total_power();
  const double p_priv = scheme.uses_common_stream() ? 0.5 * Pt : Pt;
  const ZfSubset sel = best_zf_subset(ch, budget, scheme);

  Precoders P;
  P.common = CVector::Zero(Nt);
  P.private_streams.assign(K, CVector::Zero(Nt));
  if (scheme.uses_common_stream()) {
    CVector sum = CVector::Zero(Nt);
    for (int k = 0; k < K; ++k) sum += ch.channel(k);
    if (sum.norm() > 1e-12) {
      P.common = std::sqrt(0.5 * Pt) * CVector(sum.normalized());
    }
  }
  if (!sel.users.empty()) {
    const double amp = std::sqrt(p_priv / sel.users.size());
    for (std::size_t i = 0; i < sel.users.size(); ++i) {
      P.private_streams[sel.users[i]] = amp * sel.beams[i];
    }
  }
  return P;
}

// Minimum-power beamforming via uplink-downlink duality: MMSE beams and
// powers from the dual fixed point hold stream lift[i] at SINR gstar[i]
// against the interference the rest of the solution already produces (folded
// into each user's effective noise).  Joint by construction, so rebuilt
// streams account for one another instead of spiraling.
bool duality_lift(const ChannelSet& ch, const std::vector<int>& lift,
                  const Eigen::VectorXd& gstar, Precoders& P) {
  const int Nt = ch.num_tx_antennas();
  const int m = static_cast<int>(lift.size());
  if (m == 0) return true;
  std::vector<CVector> ht(m);
  for (int i = 0; i < m; ++i) {
    const int k = lift[i];
    double nk = private_ipn_at(ch, P, k);
    for (int j : lift) {
      if (j != k) nk -= received_power(ch.channel(k), P.private_streams[j]);
    }
    nk = std::max(nk, 1.0);
    ht[i] = ch.channel(k) / std::sqrt(nk);
  }
  Eigen::VectorXd lam(m);
  for (int i = 0; i < m; ++i) lam(i) = gstar(i) / ht[i].squaredNorm();
  for (int it = 0; it < 500; ++it) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(Nt, Nt);
    for (int i = 0; i < m; ++i) A += lam(i) * ht[i] * ht[i].adjoint();
    double delta = 0.0;
    for (int i = 0; i < m; ++i) {
      const Eigen::MatrixXcd Ai = A - lam(i) * ht[i] * ht[i].adjoint();
      const double eff =
          (ht[i].adjoint() * Ai.inverse() * ht[i]).real()(0, 0);
      if (!(eff > 0.0)) return false;
      const double next = gstar(i) / eff;
      delta = std::max(delta, std::abs(next - lam(i)));
      lam(i) = next;
    }
    if (delta < 1e-11) break;
  }
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(Nt, Nt);
  for (int i = 0; i < m; ++i) A += lam(i) * ht[i] * ht[i].adjoint();
  const Eigen::MatrixXcd Ainv = A.inverse();
  std::vector<CVector> w(m);
  for (int i = 0; i < m; ++i) {
    w[i] = Ainv * ht[i];
    const double nrm = w[i].norm();
    if (!(nrm > 1e-12)) return false;
    w[i] /= nrm;
  }
  Eigen::MatrixXd G(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      G(i, j) = std::norm((ht[i].adjoint() * w[j])(0));
    }
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      M(i, j) = (i == j) ? G(i, i) : -gstar(i) * G(i, j);
    }
  }
  const Eigen::VectorXd p = M.fullPivLu().solve(gstar);
  if (!p.allFinite() || p.minCoeff() < 0.0) return false;
  for (int i = 0; i < m; ++i) {
    P.private_streams[lift[i]] = std::sqrt(p(i)) * w[i];
  }
  return true;
}

bool duality_lift(const ChannelSet& ch, const std::vector<int>& lift,
                  double gstar, Precoders& P) {
  return duality_lift(
      ch, lift,
      Eigen::VectorXd::Constant(static_cast<int>(lift.size()), gstar), P);
}

// Rate-preserving floor graft: rebuild every active private stream so the
// alive ones keep their current SINR while the dead ones come up to the
// floor, at minimum total power.  When both together do not fit the budget,
// the alive targets are shrunk toward the floor by bisection; the floors
// themselves are never given up.
bool graft_floors(const ChannelSet& ch, const PowerBudget& budget,
                  double floor_sinr, const SchemeKind& scheme, Precoders& P) {
  const int K = ch.num_users();
  std::vector<int> act;
  for (int k = 0; k < K; ++k) {
    if (scheme.private_stream_active(k)) act.push_back(k);
  }
  const int m = static_cast<int>(act.size());
  if (m == 0) return true;
  Eigen::VectorXd cur(m);
  for (int i = 0; i < m; ++i) {
    const int k = act[i];
    cur(i) = received_power(ch.channel(k), P.private_streams[k]) /
             private_ipn_at(ch, P, k);
  }
  const double room =
      (budget.total_power() - P.common.squaredNorm()) * (1.0 - 1e-6);
  if (room <= 0.0) return false;
  const auto attempt = [&](double t, Precoders& out) {
    Eigen::VectorXd gamma(m);
    for (int i = 0; i < m; ++i) {
      gamma(i) = std::max(floor_sinr, t * cur(i));
    }
    out = P;
    double priv = 0.0;
    if (!duality_lift(ch, act, gamma, out)) return false;
    for (int k : act) priv += out.private_streams[k].squaredNorm();
    return priv <= room;
  };
  Precoders trial;
  if (attempt(1.0, trial)) {
    P = std::move(trial);
    return true;
  }
  double lo = 0.0, hi = 1.0;
  if (!attempt(lo, trial)) return false;
  Precoders best = trial;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (attempt(mid, trial)) {
      best = trial;
      lo = mid;
    } else {
      hi = mid;
    }
  }
  P = std::move(best);
  return true;
}

// First-round anchor repair.  A dispersion tangent anchored where the rate is
// negative stays negative for every SINR, which makes the first subproblem
// infeasible even when the true problem is not: the common-rate bound falls
// below the zero the shares need, and floored users cannot reach the target
// from a tangent with no headroom.  Lift every active stream to an SINR whose
// tangent clears what the constraints ask of it before the first
// linearization; later rounds inherit feasibility from their own iterates.
ExpansionPoint repair_round_one(const ChannelSet& ch, const PowerBudget& budget,
                                const FblParams& params, double qos_bits,
                                const SchemeKind& scheme,
                                const SolveOptions& options,
                                ExpansionPoint point) {
  const int K = ch.num_users();
  const int Nt = ch.num_tx_antennas();
  const double Pt = budget.total_power();
  const double d = options.disable_dispersion ? 0.0 : params.d_const();
  // Escape the dead zone only: past twice the zero-rate SINR the dispersion
  // tangent regains enough upward reach that the subproblem can raise the
  // stream to any floor by itself, jointly with every other constraint.
  // Chasing the floor SINR here instead buys it with brute anchor power and
  // wrecks the warm start.
  const double target =
      std::max(2.0 * sinr_clearing(0.0, d), 10.0 * options.rho_min);
  if (qos_bits <= 0.0 && d <= 0.0) return point;

  Precoders P = std::move(point.precoders);
  const std::vector<CVector> dirs = rzf_directions(ch, Pt);

  // The common stream is decoded by everyone, so a direction that nulls one
  // user caps its rate at that user no matter how much power it gets.  Swap
  // to the candidate direction with the best worst-user gain when that helps;
  // a dead common stream gets a direction and a token power so the scaling
  // step below can raise it (the subproblem cannot revive an exact zero).
  if (scheme.uses_common_stream()) {
    const double pc = P.common.norm();
    std::vector<CVector> cands;
    if (pc > 1e-12) cands.push_back(CVector(P.common / pc));
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(Nt, Nt);
    for (int k = 0; k < K; ++k) {
      gram += ch.channel(k) * ch.channel(k).adjoint();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    cands.push_back(CVector(es.eigenvectors().col(Nt - 1)));
    CVector mix = CVector::Zero(Nt);
    for (int k = 0; k < K; ++k) mix += dirs[k];
    if (mix.norm() > 1e-12) cands.push_back(CVector(mix.normalized()));
    int best = 0;
    double best_gain = -1.0;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        worst = std::min(worst, received_power(ch.channel(k), cands[c]));
      }
      if (worst > best_gain) {
        best_gain = worst;
        best = static_cast<int>(c);
      }
    }
    if (pc > 1e-12 && best != 0) {
      P.common = pc * cands[best];
    } else if (pc <= 1e-12) {
      P.common = 1e-3 * cands[best];
    }
  }

  // Lift weak streams toward the target SINR; the extra passes absorb the
  // interference each lift adds to the others.  The lift direction is the
  // user's channel projected off the strongest other streams' channels: the
  // floor is bought with the best gain available that leaves the streams
  // carrying the objective untouched.
  std::vector<bool> lifted(K, false);
  for (int pass = 0; pass < 3; ++pass) {
    bool changed = false;
    if (scheme.uses_common_stream()) {
      const double pc2 = P.common.squaredNorm();
      double scale_sq = 1.0;
      for (int k = 0; k < K && pc2 > 0.0; ++k) {
        const double gc = received_power(ch.channel(k), P.common);
        if (gc <= 1e-12 * pc2) {
          scale_sq = 1.0;
          break;
        }
        scale_sq = std::max(scale_sq, target * common_ipn_at(ch, P, k) / gc);
      }
      if (scale_sq > 1.0 + 1e-12) {
        P.common *= std::sqrt(scale_sq);
        changed = true;
      }
    }
    const double reach_needed = std::max(qos_bits + 0.01, 0.02);
    // Anchor SINR the lifted streams aim for: the smallest one whose tangent
    // clears the active floor, with headroom.  Kept minimal on purpose: the
    // lift only has to wake the stream up, the subproblem does the raising.
    double gstar = target;
    for (int i = 0; i < 60 && tangent_reach(gstar, d) < reach_needed; ++i) {
      gstar *= 1.5;
    }
    std::vector<int> lift;
    for (int k = 0; k < K; ++k) {
      if (!scheme.private_stream_active(k)) continue;
      const double ipn = private_ipn_at(ch, P, k);
      const double sig = received_power(ch.channel(k), P.private_streams[k]);
      // A stream whose tangent already reaches past the floor needs no help;
      // re-lifting it would overwrite the warm start the last stage produced.
      if (sig >= target * ipn) continue;
      if (tangent_reach(sig / ipn, d) >= reach_needed) continue;
      lift.push_back(k);
    }
    if (!lift.empty() && duality_lift(ch, lift, gstar, P)) {
      for (int k : lift) lifted[k] = true;
      changed = true;
    }

    // Keep the repaired point inside the budget by taxing the streams that
    // were not lifted: they sit at high SINR where power has little rate
    // slope, and an in-budget anchor keeps the first subproblem's optimum at
    // or above the anchor's own exact value.
    double lifted_total = 0.0, other_total = P.common.squaredNorm();
    for (int k = 0; k < K; ++k) {
      (lifted[k] ? lifted_total : other_total) +=
          P.private_streams[k].squaredNorm();
    }
    const double total = lifted_total + other_total;
    if (total > Pt && other_total > 0.0 && lifted_total < Pt) {
      const double s =
          std::sqrt(std::max(Pt - lifted_total, 0.0) / other_total) *
          (1.0 - 1e-9);
      if (s < 1.0) {
        P.common *= s;
        for (int k = 0; k < K; ++k) {
          if (!lifted[k]) P.private_streams[k] *= s;
        }
        changed = true;
      }
    }
    if (!changed) break;
  }

  // Last resort when the lifts alone exceed the budget.
  const double total = P.total_power();
  if (total > Pt) {
    const double s = std::sqrt(Pt / total) * (1.0 - 1e-9);
    P.common *= s;
    for (auto& p : P.private_streams) p *= s;
  }
  if (std::getenv("RSFBL_DEBUG_CONT")) {
    const auto fbl = [&](double g) {
      const double ip = 1.0 + g;
      return std::log2(ip) - d * std::sqrt(1.0 - 1.0 / (ip * ip));
    };
    double sum = 0.0, mn = 1e9;
    for (int k = 0; k < K; ++k) {
      if (!scheme.private_stream_active(k)) continue;
      const double r = fbl(received_power(ch.channel(k), P.private_streams[k]) /
                           private_ipn_at(ch, P, k));
      sum += r;
      mn = std::min(mn, r);
    }
    std::fprintf(stderr,
                 "[repair] q=%.4f total=%.2f priv_sum=%.3f min=%.4f lifts:",
                 qos_bits, P.total_power(), sum, mn);
    for (int k = 0; k < K; ++k) {
      std::fprintf(stderr, " %.1f%s", P.private_streams[k].squaredNorm(),
                   lifted[k] ? "*" : "");
    }
    std::fprintf(stderr, "\n");
  }
  return anchors_from(ch, std::move(P), scheme, options.rho_min);
}

struct Layout {
  int Nt = 0;
  int K = 0;
  int pc = 0;
  std::vector<int> pp;
  int C = 0;
  int beta = 0;
  int rho_c = 0;
  int rho_p = 0;
  int sigma_c = 0;
  int sigma_p = 0;
};

Layout declare_blocks(convex::ConvexProgram& prog, int Nt, int K) {
  Layout L;
  L.Nt = Nt;
  L.K = K;
  L.pc = prog.add_variable_block("pc", 2 * Nt);
  for (int k = 0; k < K; ++k) {
    L.pp.push_back(prog.add_variable_block(pp_name(k), 2 * Nt));
  }
  L.C = prog.add_variable_block("C", K);
  L.beta = prog.add_variable_block("beta", K);
  L.rho_c = prog.add_variable_block("rho_c", K);
  L.rho_p = prog.add_variable_block("rho_p", K);
  L.sigma_c = prog.add_variable_block("sigma_c", K);
  L.sigma_p = prog.add_variable_block("sigma_p", K);
  return L;
}

// sigma >= ||q||^2 + 1 as the cone || [2 q; sigma - 2] || <= sigma, where q are
// the stacked real and imaginary received amplitudes of the interfering streams.
void add_ipn_cone(convex::ConvexProgram& prog, const Layout& L,
                  const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                  const std::vector<int>& interferers, int sigma_index,
                  const std::string& label) {
  std::vector<convex::LinExpr> elems;
  for (int j : interferers) {
    convex::LinExpr re = prog.expr();
    re.coeffs.segment(L.pp[j], 2 * L.Nt) = 2.0 * u;
    elems.push_back(std::move(re));
    convex::LinExpr im = prog.expr();
    im.coeffs.segment(L.pp[j], 2 * L.Nt) = 2.0 * v;
    elems.push_back(std::move(im));
  }
  convex::LinExpr shifted = prog.expr();
  shifted.coeffs[sigma_index] = 1.0;
  shifted.constant = -2.0;
  elems.push_back(std::move(shifted));
  convex::LinExpr bound = prog.expr();
  bound.coeffs[sigma_index] = 1.0;
  prog.add_soc(std::move(elems), std::move(bound), label);
}

SubSolution extract_solution(const convex::ConvexProgram& prog,
                             const convex::Solution& sol, const Layout& L) {
  SubSolution sub;
  sub.point = sol.x;
  sub.objective = sol.status.objective_value;
  sub.precoders = Precoders::zeros(L.Nt, L.K);
  sub.precoders.common = unstack(prog.slice("pc", sol.x));
  for (int k = 0; k < L.K; ++k) {
    sub.precoders.private_streams[k] = unstack(prog.slice(pp_name(k), sol.x));
  }
  sub.common_split = prog.slice("C", sol.x);
  sub.private_rate_bounds = prog.slice("beta", sol.x);
  sub.common_sinr = prog.slice("rho_c", sol.x);
  sub.private_sinr = prog.slice("rho_p", sol.x);
  sub.common_ipn = prog.slice("sigma_c", sol.x);
  sub.private_ipn = prog.slice("sigma_p", sol.x);
  return sub;
}

ExpansionPoint next_point(const SubSolution& sub, const SchemeKind& scheme,
                          int K, double rho_min) {
  ExpansionPoint pt;
  pt.precoders = sub.precoders;
  pt.common_sinr.resize(K);
  pt.private_sinr.resize(K);
  pt.common_ipn.resize(K);
  pt.private_ipn.resize(K);
  for (int k = 0; k < K; ++k) {
    const bool c_on = scheme.uses_common_stream();
    const bool p_on = scheme.private_stream_active(k);
    pt.common_sinr[k] = c_on ? std::max(sub.common_sinr[k], rho_min) : rho_min;
    pt.private_sinr[k] = p_on ? std::max(sub.private_sinr[k], rho_min) : rho_min;
    pt.common_ipn[k] = c_on ? std::max(sub.common_ipn[k], 1.0) : 1.0;
    pt.private_ipn[k] = p_on ? std::max(sub.private_ipn[k], 1.0) : 1.0;
  }
  return pt;
}

// Recomputes the rate variables of a finished iterate exactly from its
// precoders: the auxiliary bounds from the subproblem are conservative, so the
// solution is restated in terms of the true SINRs before it is reported or
// audited.  Returns nothing when the exact restatement cannot meet the QoS
// targets (the caller then keeps the raw subproblem values).
std::optional<SubSolution> exact_finish(const ChannelSet& ch,
                                        const FblParams& params, double qos_bits,
                                        const SchemeKind& scheme,
                                        const SubSolution& raw) {
  const int K = ch.num_users();
  SubSolution fin = raw;
  fin.common_sinr.resize(K);
  fin.private_sinr.resize(K);
  fin.common_ipn.resize(K);
  fin.private_ipn.resize(K);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(K);
  double common_rate = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    fin.common_ipn[k] = common_ipn_at(ch, raw.precoders, k);
    fin.private_ipn[k] = private_ipn_at(ch, raw.precoders, k);
    fin.common_sinr[k] =
        scheme.uses_common_stream()
            ? received_power(ch.channel(k), raw.precoders.common) / fin.common_ipn[k]
            : 0.0;
    fin.private_sinr[k] =
        scheme.private_stream_active(k)
            ? received_power(ch.channel(k), raw.precoders.private_streams[k]) /
                  fin.private_ipn[k]
            : 0.0;
    if (scheme.private_stream_active(k)) {
      beta[k] = fbl_rate(fin.private_sinr[k], params);
    }
    if (scheme.uses_common_stream()) {
      common_rate = std::min(common_rate, fbl_rate(fin.common_sinr[k], params));
    }
  }
  if (!scheme.uses_common_stream()) common_rate = 0.0;
  if (common_rate < 0.0) return std::nullopt;

  Eigen::VectorXd C = Eigen::VectorXd::Zero(K);
  double base_sum = 0.0;
  int num_sharers = 0;
  for (int k = 0; k < K; ++k) {
    if (scheme.common_share_active(k)) {
      C[k] = std::max(0.0, qos_bits - beta[k]);
      base_sum += C[k];
      ++num_sharers;
    } else if (beta[k] < qos_bits - 1e-12) {
      return std::nullopt;  // this user has no common share to fall back on
    }
  }
  if (num_sharers > 0) {
    if (base_sum > common_rate) return std::nullopt;
    const double extra = common_rate - base_sum;
    double wsum = 0.0;
    for (int k = 0; k < K; ++k) {
      if (scheme.common_share_active(k)) wsum += std::max(0.0, raw.common_split[k]);
    }
    for (int k = 0; k < K; ++k) {
      if (!scheme.common_share_active(k)) continue;
      const double w = wsum > 0.0 ? std::max(0.0, raw.common_split[k]) / wsum
                                  : 1.0 / num_sharers;
      C[k] += extra * w;
    }
  }
  fin.common_split = C;
  fin.private_rate_bounds = beta;
  fin.objective = C.sum() + beta.sum();
  return fin;
}

struct RunState {
  ScaResult result;
  double best_objective = -std::numeric_limits<double>::infinity();
};

ScaResult run_once(const ChannelSet& channels, const PowerBudget& budget,
                   const FblParams& params, double qos_bits,
                   const SchemeKind& scheme, const SolveOptions& options,
                   ExpansionPoint point) {
  ScaResult res;
  const int K = channels.num_users();
  point = repair_round_one(channels, budget, params, qos_bits, scheme, options,
                           std::move(point));
  double t_prev = 0.0;
  std::optional<SubSolution> best;
  double best_t = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd warm;
  bool have_warm = false;
  res.outcome = ScaResult::Outcome::IterationLimit;

  for (int n = 1; n <= options.max_sca_iterations; ++n) {
    res.iterations = n;
    if (options.keep_history) res.history.push_back(point);

    convex::ConvexProgram prog =
        build_subproblem(channels, budget, params, qos_bits, point, scheme, options);
    if (have_warm) prog.set_start_hint(warm);
    Layout L;
    L.Nt = channels.num_tx_antennas();
    L.K = K;
    L.pc = prog.block("pc").first;
    for (int k = 0; k < K; ++k) L.pp.push_back(prog.block(pp_name(k)).first);

    convex::Solution sol =
        convex::solve(prog, options.solver_tolerance, options.max_newton_steps);
    using SS = convex::SolveState;
    if (sol.status.state == SS::Infeasible) {
      if (n == 1) {
        res.outcome = ScaResult::Outcome::Infeasible;
        res.message = "first subproblem infeasible: " + sol.status.message;
        return res;
      }
      // A moving tangent can cut off the current region mid-run (short
      // blocklengths drive the common-rate bound negative).  Keep the best
      // iterate found so far.
      res.outcome = ScaResult::Outcome::Converged;
      res.message = "stopped at round " + std::to_string(n) +
                    ": subproblem became infeasible";
      break;
    }
    // A path that stopped just short of the requested gap still carries a
    // strictly feasible, near-optimal point; the exact restatement at the
    // end re-audits whatever we accept here.
    const bool close_enough =
        sol.status.state == SS::IterationLimit &&
        std::isfinite(sol.status.kkt_residual) &&
        sol.status.kkt_residual <= 100.0 * options.solver_tolerance;
    if (sol.status.state != SS::Optimal && !close_enough) {
      res.outcome = ScaResult::Outcome::SolverFailure;
      res.failure_iteration = n;
      res.message = std::string("subproblem solver reported ") +
                    convex::to_string(sol.status.state) +
                    (sol.status.message.empty() ? "" : ": " + sol.status.message);
      break;
    }

    const double t_n = sol.status.objective_value;
    if (n >= 2 && t_n < t_prev - 1e-9) {
      // Floored anchors can nudge the bound downward; the iteration is done.
      res.outcome = ScaResult::Outcome::Converged;
      res.message = "stopped at round " + std::to_string(n) +
                    ": objective would have decreased";
      break;
    }
    res.trace.push_back(t_n);
    SubSolution sub = extract_solution(prog, sol, L);
    point = next_point(sub, scheme, K, options.rho_min);
    if (t_n >= best_t) {
      best_t = t_n;
      best = std::move(sub);
    }
    if (std::abs(t_n - t_prev) < options.sca_tolerance) {
      res.outcome = ScaResult::Outcome::Converged;
      break;
    }
    warm = sol.x;
    have_warm = true;
    t_prev = t_n;
  }

  if (best) {
    const FblParams eff = options.disable_dispersion
                              ? FblParams::infinite(params.bler())
                              : params;
    if (auto fin = exact_finish(channels, eff, qos_bits, scheme, *best)) {
      res.solution = std::move(*fin);
    } else {
      res.solution = std::move(*best);
      res.message += (res.message.empty() ? "" : "; ");
      res.message += "exact restatement infeasible, raw subproblem values kept";
    }
  } else if (res.outcome == ScaResult::Outcome::Converged) {
    // Converged without a single accepted round cannot happen; keep a guard.
    res.outcome = ScaResult::Outcome::SolverFailure;
  }
  return res;
}

Precoders random_precoders(const ChannelSet& ch, const PowerBudget& budget,
                           const SchemeKind& scheme, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uniform01 = [&gen]() {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
  };
  auto gaussian_vec = [&](int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) {
      const double r = std::sqrt(-2.0 * std::log(uniform01()));
      const double a = 2.0 * M_PI * uniform01();
      v[i] = Complex(r * std::cos(a), r * std::sin(a)) / std::sqrt(2.0);
    }
    return v;
  };
  const int Nt = ch.num_tx_antennas();
  const int K = ch.num_users();
  Precoders P = Precoders::zeros(Nt, K);
  if (scheme.uses_common_stream()) P.common = gaussian_vec(Nt);
  for (int k = 0; k < K; ++k) {
    if (scheme.private_stream_active(k)) P.private_streams[k] = gaussian_vec(Nt);
  }
  const double frac = 0.3 + 0.65 * uniform01();
  const double total = P.total_power();
  if (total > 0.0) {
    const double scale = std::sqrt(frac * budget.total_power() / total);
    P.common *= scale;
    for (auto& p : P.private_streams) p *= scale;
  }
  return P;
}

}  // namespace

const char* to_string(ScaResult::Outcome o) {
  switch (o) {
    case ScaResult::Outcome::Converged: return "converged";
    case ScaResult::Outcome::Infeasible: return "infeasible";
    case ScaResult::Outcome::SolverFailure: return "solver_failure";
    case ScaResult::Outcome::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

DispersionTangent linearize_dispersion(double rho_anchor, double d_const,
                                       double rho_min) {
  if (!(d_const >= 0.0) || !std::isfinite(d_const)) {
    throw std::invalid_argument("linearize_dispersion: invalid d_const");
  }
  DispersionTangent t;
  t.anchor = rho_anchor;
  if (d_const == 0.0) return t;
  if (!(rho_anchor >= rho_min)) {
    throw std::domain_error(
        "linearize_dispersion: anchor below the SINR floor");
  }
  const double ip = 1.0 + rho_anchor;
  const double nu = 1.0 - 1.0 / (ip * ip);
  const double root = std::sqrt(nu);
  t.value = d_const * root;
  t.slope = d_const / (ip * ip * ip * root);
  return t;
}

double QuadOverLinTangent::at(const CVector& p, double sigma) const {
  return p_coeffs.dot(stack(p)) + sigma_coeff * sigma;
}

QuadOverLinTangent linearize_quadratic_over_linear(const CVector& p_anchor,
                                                   double ipn_anchor,
                                                   const CVector& h) {
  if (!(ipn_anchor > 0.0) || !std::isfinite(ipn_anchor)) {
    throw std::domain_error(
        "linearize_quadratic_over_linear: anchor denominator must be positive");
  }
  if (p_anchor.size() != h.size()) {
    throw std::invalid_argument("linearize_quadratic_over_linear: size mismatch");
  }
  const Complex alpha = Complex(h.adjoint() * p_anchor);
  QuadOverLinTangent t;
  t.p_coeffs =
      (2.0 / ipn_anchor) * (alpha.real() * re_row(h) + alpha.imag() * im_row(h));
  t.sigma_coeff = -std::norm(alpha) / (ipn_anchor * ipn_anchor);
  return t;
}

bool ExpansionPoint::is_consistent(const ChannelSet& channels,
                                   const SchemeKind& scheme, double rho_min,
                                   double rtol) const {
  const int K = channels.num_users();
  if (common_sinr.size() != K || private_sinr.size() != K ||
      common_ipn.size() != K || private_ipn.size() != K) {
    return false;
  }
  auto close = [rtol](double a, double b) {
    return std::abs(a - b) <= rtol * (1.0 + std::max(std::abs(a), std::abs(b)));
  };
  for (int k = 0; k < K; ++k) {
    if (scheme.uses_common_stream()) {
      const double ipn = common_ipn_at(channels, precoders, k);
      if (!close(common_ipn[k], ipn)) return false;
      const double g = received_power(channels.channel(k), precoders.common) / ipn;
      if (!close(common_sinr[k], g) && !(g < rho_min && common_sinr[k] == rho_min)) {
        return false;
      }
    }
    if (scheme.private_stream_active(k)) {
      const double ipn = private_ipn_at(channels, precoders, k);
      if (!close(private_ipn[k], ipn)) return false;
      const double g =
          received_power(channels.channel(k), precoders.private_streams[k]) / ipn;
      if (!close(private_sinr[k], g) &&
          !(g < rho_min && private_sinr[k] == rho_min)) {
        return false;
      }
    }
  }
  return true;
}

ExpansionPoint initial_point(const ChannelSet& channels,
                             const PowerBudget& budget,
                             const SchemeKind& scheme, double rho_min) {
  scheme.check_num_users(channels.num_users());
  const int Nt = channels.num_tx_antennas();
  const int K = channels.num_users();
  const double Pt = budget.total_power();
  Precoders P = Precoders::zeros(Nt, K);
  if (scheme.uses_common_stream()) {
    CVector dir = CVector::Zero(Nt);
    for (int k = 0; k < K; ++k) dir += channels.channel(k).normalized();
    if (dir.norm() < 1e-6) dir = channels.channel(0);
    P.common = std::sqrt(Pt / 2.0) * dir.normalized();
  }
  const std::vector<CVector> dirs = rzf_directions(channels, Pt);
  const double priv_amp = std::sqrt(Pt / (2.0 * K));
  for (int k = 0; k < K; ++k) {
    if (scheme.private_stream_active(k)) {
      P.private_streams[k] = priv_amp * dirs[k];
    }
  }
  return anchors_from(channels, std::move(P), scheme, rho_min);
}

convex::ConvexProgram build_subproblem(const ChannelSet& channels,
                                       const PowerBudget& budget,
                                       const FblParams& params,
                                       double qos_bits,
                                       const ExpansionPoint& point,
                                       const SchemeKind& scheme,
                                       const SolveOptions& options) {
  const int Nt = channels.num_tx_antennas();
  const int K = channels.num_users();
  scheme.check_num_users(K);
  if (!(qos_bits >= 0.0) || !std::isfinite(qos_bits)) {
    throw std::invalid_argument("build_subproblem: invalid QoS target");
  }
  if (point.common_sinr.size() != K || point.private_sinr.size() != K ||
      point.common_ipn.size() != K || point.private_ipn.size() != K ||
      point.precoders.num_users() != K ||
      point.precoders.common.size() != Nt) {
    throw std::invalid_argument("build_subproblem: expansion point size mismatch");
  }
  const double d = options.disable_dispersion ? 0.0 : params.d_const();

  convex::ConvexProgram prog;
  const Layout L = declare_blocks(prog, Nt, K);

  convex::LinExpr obj = prog.expr();
  for (int k = 0; k < K; ++k) {
    obj.coeffs[L.C + k] = 1.0;
    obj.coeffs[L.beta + k] = 1.0;
  }
  prog.set_objective(std::move(obj));

  // Total transmit power across every stream.
  {
    std::vector<convex::LinExpr> elems;
    auto push_block = [&](int offset) {
      for (int i = 0; i < 2 * Nt; ++i) {
        convex::LinExpr e = prog.expr();
        e.coeffs[offset + i] = 1.0;
        elems.push_back(std::move(e));
      }
    };
    push_block(L.pc);
    for (int k = 0; k < K; ++k) push_block(L.pp[k]);
    convex::LinExpr bound = prog.expr();
    bound.constant = std::sqrt(budget.total_power());
    prog.add_soc(std::move(elems), std::move(bound), "power");
  }

  std::vector<int> all_streams;
  for (int j = 0; j < K; ++j) all_streams.push_back(j);

  for (int k = 0; k < K; ++k) {
    const CVector& h = channels.channel(k);
    const Eigen::VectorXd u = re_row(h), v = im_row(h);
    const std::string ks = std::to_string(k);

    if (scheme.uses_common_stream()) {
      add_ipn_cone(prog, L, u, v, all_streams, L.sigma_c + k, "soc_common/" + ks);

      const QuadOverLinTangent qt = linearize_quadratic_over_linear(
          point.precoders.common, point.common_ipn[k], h);
      convex::LinExpr lin = prog.expr();
      lin.coeffs.segment(L.pc, 2 * Nt) = qt.p_coeffs;
      lin.coeffs[L.sigma_c + k] = qt.sigma_coeff;
      lin.coeffs[L.rho_c + k] -= 1.0;
      prog.add_affine(std::move(lin), "lin_common/" + ks);

      const DispersionTangent dt =
          linearize_dispersion(point.common_sinr[k], d, options.rho_min);
      convex::LinExpr arg = prog.expr();
      arg.coeffs[L.rho_c + k] = 1.0;
      convex::LinExpr rest = prog.expr();
      rest.coeffs[L.rho_c + k] = -dt.slope;
      for (int j = 0; j < K; ++j) rest.coeffs[L.C + j] -= 1.0;
      rest.constant = -dt.value + dt.slope * dt.anchor;
      prog.add_log(kLog2E, std::move(arg), std::move(rest), "rate_common/" + ks);

      convex::LinExpr nn = prog.expr();
      nn.coeffs[L.rho_c + k] = 1.0;
      prog.add_affine(std::move(nn), "rho_c_nonneg/" + ks);
    }

    if (scheme.private_stream_active(k)) {
      std::vector<int> others;
      for (int j = 0; j < K; ++j) {
        if (j != k) others.push_back(j);
      }
      add_ipn_cone(prog, L, u, v, others, L.sigma_p + k, "soc_private/" + ks);

      const QuadOverLinTangent qt = linearize_quadratic_over_linear(
          point.precoders.private_streams[k], point.private_ipn[k], h);
      convex::LinExpr lin = prog.expr();
      lin.coeffs.segment(L.pp[k], 2 * Nt) = qt.p_coeffs;
      lin.coeffs[L.sigma_p + k] = qt.sigma_coeff;
      lin.coeffs[L.rho_p + k] -= 1.0;
      prog.add_affine(std::move(lin), "lin_private/" + ks);

      const DispersionTangent dt =
          linearize_dispersion(point.private_sinr[k], d, options.rho_min);
      convex::LinExpr arg = prog.expr();
      arg.coeffs[L.rho_p + k] = 1.0;
      convex::LinExpr rest = prog.expr();
      rest.coeffs[L.rho_p + k] = -dt.slope;
      rest.coeffs[L.beta + k] = -1.0;
      rest.constant = -dt.value + dt.slope * dt.anchor;
      prog.add_log(kLog2E, std::move(arg), std::move(rest), "rate_private/" + ks);

      convex::LinExpr nn = prog.expr();
      nn.coeffs[L.rho_p + k] = 1.0;
      prog.add_affine(std::move(nn), "rho_p_nonneg/" + ks);
    }

    convex::LinExpr qos = prog.expr();
    qos.coeffs[L.C + k] = 1.0;
    qos.coeffs[L.beta + k] = 1.0;
    qos.constant = -qos_bits;
    prog.add_affine(std::move(qos), "qos/" + ks);

    convex::LinExpr cn = prog.expr();
    cn.coeffs[L.C + k] = 1.0;
    prog.add_affine(std::move(cn), "c_nonneg/" + ks);
  }

  // All constraint sets above leave some directions barrier-free when anchor
  // powers vanish; a generous ball keeps every subproblem bounded without
  // touching the optimum.
  double coord = std::sqrt(budget.total_power());
  for (int k = 0; k < K; ++k) {
    coord = std::max(coord,
                     channels.channel(k).squaredNorm() * (1.0 + budget.total_power()));
  }
  const double b_coord = 2.0 + coord;
  prog.set_bounding_ball(20.0 * std::sqrt(static_cast<double>(prog.num_variables())) *
                         b_coord);

  apply_scheme_constraints(prog, scheme, K);
  return prog;
}

ScaResult sca_solve(const ChannelSet& channels, const PowerBudget& budget,
                    const FblParams& params, double qos_bits,
                    const SchemeKind& scheme, const SolveOptions& options) {
  scheme.check_num_users(channels.num_users());
  if (!(options.sca_tolerance > 0.0) || options.max_sca_iterations <= 0 ||
      !(options.solver_tolerance > 0.0) || options.max_newton_steps <= 0 ||
      options.restarts < 0 || !(options.rho_min > 0.0)) {
    throw std::invalid_argument("sca_solve: invalid options");
  }

  std::vector<ScaResult> runs;
  runs.push_back(run_once(channels, budget, params, qos_bits, scheme, options,
                          initial_point(channels, budget, scheme, options.rho_min)));

  if (qos_bits > 0.0) {
    const int K = channels.num_users();
    const int Nt = channels.num_tx_antennas();
    const double d = options.disable_dispersion ? 0.0 : params.d_const();
    const int stages = 5;
    Precoders carry;
    bool have_carry = false;
    int first_stage = 0;
    bool floors_grafted = false;

    // Overloaded systems: solve the floor-free stage on the best-subset
    // system alone, then graft the floors onto that solution at minimum
    // power.  Keeping the left-out users in the program drags the ascent
    // toward spreading power over everyone, because a silent stream needs a
    // strictly positive rate slack to enter the interior-point subproblem at
    // all; and once power is spread, no floor schedule concentrates it
    // again.  The graft rebuilds all private streams with dual MMSE beams so
    // the subset streams keep their exact SINRs while the left-out users
    // meet the floor, which starts the full-floor ascent at the floor-free
    // value instead of asking it to climb there.
    if (K > Nt && !scheme.is_noma()) {
      const ZfSubset sel = best_zf_subset(channels, budget, scheme);
      const int m = static_cast<int>(sel.users.size());
      if (m >= 1 && m < K) {
        std::vector<CVector> sub_chans;
        for (int u : sel.users) sub_chans.push_back(channels.channel(u));
        const ChannelSet sub_ch(Nt, sub_chans);
        ScaResult s0 = run_once(
            sub_ch, budget, params, 0.0, scheme, options,
            anchors_from(sub_ch, subset_zf_precoders(sub_ch, budget, scheme),
                         scheme, options.rho_min));
        if (std::getenv("RSFBL_DEBUG_CONT")) {
          std::fprintf(stderr, "[cont] subset m=%d out=%d obj=%.4f\n", m,
                       (int)s0.outcome,
                       s0.solution ? s0.solution->objective : -1.0);
        }
        if (s0.converged() && s0.solution) {
          carry.common = s0.solution->precoders.common;
          carry.private_streams.assign(K, CVector::Zero(Nt));
          for (int i = 0; i < m; ++i) {
            carry.private_streams[sel.users[i]] =
                s0.solution->precoders.private_streams[i];
          }
          have_carry = true;
          first_stage = 1;
          Precoders grafted = carry;
          if (graft_floors(channels, budget,
                           1.15 * sinr_clearing(qos_bits, d), scheme,
                           grafted)) {
            runs.push_back(run_once(
                channels, budget, params, qos_bits, scheme, options,
                anchors_from(channels, std::move(grafted), scheme,
                             options.rho_min)));
            floors_grafted = runs.back().converged() &&
                             runs.back().solution.has_value();
            if (std::getenv("RSFBL_DEBUG_CONT")) {
              std::fprintf(stderr, "[cont] graft out=%d obj=%.4f\n",
                           (int)runs.back().outcome,
                           runs.back().solution
                               ? runs.back().solution->objective
                               : -1.0);
            }
          }
        }
      }
    }

    // Rate-floor continuation, used when no grafted run landed.  Starting
    // with the floors fully active traps the ascent in configurations that
    // waste power on weak users, so anneal the floor upward in stages,
    // warm-starting each stage from the previous solution.  Gradual floors
    // let the solver steer strong streams away from the weak users' channels
    // instead of buying the floors with raw power.
    if (!floors_grafted) {
      for (int s = first_stage; s <= stages; ++s) {
        // Quadratic schedule: early stages use nearly free floors, which a
        // warm anchor can hold through cheap beam rotations, while the cost
        // of the full floor arrives only once every stream is already alive.
        const double frac = static_cast<double>(s) / stages;
        const double q = qos_bits * frac * frac;
        ExpansionPoint pt = anchors_from(
            channels,
            have_carry ? carry : subset_zf_precoders(channels, budget, scheme),
            scheme, options.rho_min);
        ScaResult stage = run_once(channels, budget, params, q, scheme,
                                   options, std::move(pt));
        if (std::getenv("RSFBL_DEBUG_CONT")) {
          std::fprintf(stderr, "[cont] stage q=%.4f out=%d obj=%.4f msg='%s'\n",
                       q, (int)stage.outcome,
                       stage.solution ? stage.solution->objective : -1.0,
                       stage.message.c_str());
        }
        if (!(stage.converged() && stage.solution)) break;
        carry = stage.solution->precoders;
        have_carry = true;
        if (s == stages) runs.push_back(std::move(stage));
      }
    }

    // Floor-anchored leg: the cheapest point that holds every floor jointly
    // (dual MMSE beams at minimum total power) spends a few percent of the
    // budget, so the ascent starts with the floors already satisfied and the
    // rest of the budget spare, instead of chasing feasibility downhill from
    // a full-power start.
    std::vector<int> active;
    for (int k = 0; k < K; ++k) {
      if (scheme.private_stream_active(k)) active.push_back(k);
    }
    Precoders base;
    base.common = CVector::Zero(Nt);
    base.private_streams.assign(K, CVector::Zero(Nt));
    const double gfull = 1.15 * sinr_clearing(qos_bits, d);
    if (!active.empty() && duality_lift(channels, active, gfull, base) &&
        base.total_power() <= budget.total_power()) {
      runs.push_back(run_once(channels, budget, params, qos_bits, scheme,
                              options,
                              anchors_from(channels, std::move(base), scheme,
                                           options.rho_min)));
    }
  }

  for (int r = 0; r < options.restarts; ++r) {
    Precoders P = random_precoders(channels, budget, scheme,
                                   options.restart_seed + static_cast<std::uint64_t>(r));
    runs.push_back(run_once(channels, budget, params, qos_bits, scheme, options,
                            anchors_from(channels, std::move(P), scheme,
                                         options.rho_min)));
  }

  int best = -1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].converged() || !runs[i].solution) continue;
    if (best < 0 ||
        runs[i].solution->objective > runs[best].solution->objective) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) return std::move(runs.front());
  return std::move(runs[best]);
}

FeasibilityCheck verify_exact_feasibility(const ChannelSet& channels,
                                          const PowerBudget& budget,
                                          const FblParams& params,
                                          double qos_bits,
                                          const SchemeKind& scheme,
                                          const SubSolution& sub, double tol) {
  FeasibilityCheck chk;
  const int K = channels.num_users();
  auto record = [&](double violation, const std::string& what) {
    if (violation > chk.worst_violation) {
      chk.worst_violation = violation;
      chk.detail = what;
    }
    if (violation > tol) chk.ok = false;
  };

  record(sub.precoders.total_power() - budget.total_power(), "power budget");
  if (!scheme.uses_common_stream()) {
    record(sub.precoders.common_power(), "common stream pinned off");
  }
  for (int k = 0; k < K; ++k) {
    const std::string ks = std::to_string(k);
    if (!scheme.private_stream_active(k)) {
      record(sub.precoders.private_power(k), "private stream " + ks + " pinned off");
      record(std::abs(sub.private_rate_bounds[k]),
             "private rate bound " + ks + " pinned off");
    }
    if (!scheme.common_share_active(k)) {
      record(std::abs(sub.common_split[k]), "common share " + ks + " pinned off");
    }
    record(-sub.common_split[k], "common share " + ks + " sign");
    record(qos_bits - (sub.common_split[k] + sub.private_rate_bounds[k]),
           "QoS target for user " + ks);
    if (scheme.private_stream_active(k)) {
      const double rate =
          fbl_rate(sinr_private(channels, sub.precoders, k), params);
      record(sub.private_rate_bounds[k] - rate, "private rate of user " + ks);
    }
  }
  if (scheme.uses_common_stream()) {
    double rc = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      rc = std::min(rc, fbl_rate(sinr_common(channels, sub.precoders, k), params));
    }
    record(sub.common_split.sum() - rc, "common rate budget");
  }
  return chk;
}

}  // namespace rsfbl
