#include "rsfbl/schemes.hpp"

#include <limits>
#include <string>

namespace rsfbl {

void apply_scheme_constraints(convex::ConvexProgram& program,
                              const SchemeKind& scheme, int num_users) {
  scheme.check_num_users(num_users);
  if (scheme.is_rsma()) return;

  if (scheme.is_sdma()) {
    program.pin_zero("pc");
    program.pin_zero("C");
    program.pin_zero("rho_c");
    program.pin_zero("sigma_c");
    program.remove_constraints_with_prefix("rate_common");
    program.remove_constraints_with_prefix("lin_common");
    program.remove_constraints_with_prefix("soc_common");
    program.remove_constraints_with_prefix("rho_c_nonneg");
    return;
  }

  const int i = scheme.noma_common_user();
  const int j = scheme.noma_private_user();
  program.pin_zero("pp" + std::to_string(i));
  program.pin_zero_index(program.block("C").first + j);
  program.pin_zero_index(program.block("beta").first + i);
  program.pin_zero_index(program.block("rho_p").first + i);
  program.pin_zero_index(program.block("sigma_p").first + i);
  const std::string is = std::to_string(i);
  program.remove_constraints_with_prefix("rate_private/" + is);
  program.remove_constraints_with_prefix("lin_private/" + is);
  program.remove_constraints_with_prefix("soc_private/" + is);
  program.remove_constraints_with_prefix("rho_p_nonneg/" + is);
}

std::vector<SchemeKind> candidates_for(int num_users) {
  std::vector<SchemeKind> out{SchemeKind::incomplete_rsma(), SchemeKind::sdma()};
  if (num_users == 2) {
    out.push_back(SchemeKind::noma(0, 1));
    out.push_back(SchemeKind::noma(1, 0));
  }
  return out;
}

FblParams per_scheme_params(std::uint64_t blocklength, const SchemeKind& scheme,
                            const SchemeBlers& blers) {
  return FblParams(blocklength, blers.for_scheme(scheme));
}

BestOfReport solve_best(const ChannelSet& channels, const PowerBudget& budget,
                        std::uint64_t blocklength, double qos_bits,
                        const SolveOptions& options, const SchemeBlers& blers) {
  BestOfReport report;
  double best_obj = -std::numeric_limits<double>::infinity();
  for (const SchemeKind& scheme : candidates_for(channels.num_users())) {
    const FblParams params = per_scheme_params(blocklength, scheme, blers);
    ScaResult res = sca_solve(channels, budget, params, qos_bits, scheme, options);
    const bool usable = res.converged() && res.solution.has_value();
    const double obj =
        usable ? res.solution->objective : -std::numeric_limits<double>::infinity();
    report.per_scheme.emplace_back(scheme, std::move(res));
    if (usable && obj > best_obj) {
      best_obj = obj;
      report.winner_index = static_cast<int>(report.per_scheme.size()) - 1;
    }
  }
  return report;
}

}  // namespace rsfbl
