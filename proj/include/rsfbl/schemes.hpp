#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rsfbl/sca.hpp"
#include "rsfbl/scheme_kind.hpp"

namespace rsfbl {

// Restricts a fully built subproblem to a scheme: variables of unused streams
// are pinned to zero and the constraints that mention only those streams are
// removed (their bounds would otherwise degenerate).
void apply_scheme_constraints(convex::ConvexProgram& program,
                              const SchemeKind& scheme, int num_users);

// Candidate schemes compared when picking the best transmission strategy.
// Two users: RSMA, SDMA and both NOMA orders.  Otherwise RSMA and SDMA.
std::vector<SchemeKind> candidates_for(int num_users);

// Default block error rates per scheme family.  SDMA needs no common-stream
// decoding at the weaker users, so it is granted a looser target; the
// rate-splitting schemes share the tighter one.
struct SchemeBlers {
  double rsma = 5e-6;
  double noma = 5e-6;
  double sdma = 1e-5;

  double for_scheme(const SchemeKind& scheme) const {
    if (scheme.is_sdma()) return sdma;
    if (scheme.is_noma()) return noma;
    return rsma;
  }
};

FblParams per_scheme_params(std::uint64_t blocklength, const SchemeKind& scheme,
                            const SchemeBlers& blers = {});

// Result of solving every candidate scheme and keeping the best converged one.
struct BestOfReport {
  std::vector<std::pair<SchemeKind, ScaResult>> per_scheme;
  int winner_index = -1;

  bool has_winner() const { return winner_index >= 0; }
  const SchemeKind& winner() const { return per_scheme.at(winner_index).first; }
  const ScaResult& selected() const { return per_scheme.at(winner_index).second; }
};

BestOfReport solve_best(const ChannelSet& channels, const PowerBudget& budget,
                        std::uint64_t blocklength, double qos_bits,
                        const SolveOptions& options = {},
                        const SchemeBlers& blers = {});

}  // namespace rsfbl
