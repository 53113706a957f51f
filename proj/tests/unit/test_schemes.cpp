#include <doctest.h>

#include "rsfbl/schemes.hpp"

using namespace rsfbl;

TEST_CASE("scheme taxonomy") {
  const SchemeKind rsma = SchemeKind::incomplete_rsma();
  CHECK(rsma.uses_common_stream());
  CHECK(rsma.private_stream_active(0));
  CHECK(rsma.common_share_active(1));
  CHECK(rsma.label() == "rsma");

  const SchemeKind sdma = SchemeKind::sdma();
  CHECK(!sdma.uses_common_stream());
  CHECK(sdma.private_stream_active(0));
  CHECK(!sdma.common_share_active(0));
  CHECK(sdma.family_label() == "sdma");

  const SchemeKind noma = SchemeKind::noma(1, 0);
  CHECK(noma.uses_common_stream());
  CHECK(noma.private_stream_active(0));
  CHECK(!noma.private_stream_active(1));
  CHECK(noma.common_share_active(1));
  CHECK(!noma.common_share_active(0));
  CHECK(noma.label() == "noma_c1_p0");
  CHECK(noma.family_label() == "noma");
  CHECK_THROWS_AS(SchemeKind::noma(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(noma.check_num_users(3), std::domain_error);
  CHECK_NOTHROW(noma.check_num_users(2));
}

TEST_CASE("candidate lists depend on the user count") {
  const auto two = candidates_for(2);
  REQUIRE(two.size() == 4);
  CHECK(two[0].is_rsma());
  CHECK(two[1].is_sdma());
  CHECK(two[2] == SchemeKind::noma(0, 1));
  CHECK(two[3] == SchemeKind::noma(1, 0));
  const auto four = candidates_for(4);
  REQUIRE(four.size() == 2);
  CHECK(four[0].is_rsma());
  CHECK(four[1].is_sdma());
}

TEST_CASE("per-scheme error-rate defaults") {
  const SchemeBlers blers;
  CHECK(per_scheme_params(500, SchemeKind::incomplete_rsma(), blers).bler() == 5e-6);
  CHECK(per_scheme_params(500, SchemeKind::noma(0, 1), blers).bler() == 5e-6);
  CHECK(per_scheme_params(500, SchemeKind::sdma(), blers).bler() == 1e-5);
  CHECK(per_scheme_params(500, SchemeKind::sdma(), blers).blocklength() == 500);
}

TEST_CASE("scheme restriction pins the unused streams to exact zeros") {
  const ChannelSet ch = random_channels(3, 2, {1.0, 1.0}, 12);
  const PowerBudget budget = PowerBudget::from_snr_db(15.0);
  const FblParams params(1000, 5e-6);

  SUBCASE("SDMA switches the common stream off") {
    const ScaResult res =
        sca_solve(ch, budget, params, 0.1, SchemeKind::sdma(), {});
    REQUIRE(res.converged());
    CHECK(res.solution->precoders.common_power() == 0.0);
    CHECK(res.solution->common_split.cwiseAbs().sum() == 0.0);
  }
  SUBCASE("NOMA silences one private stream and one share") {
    const SchemeKind noma = SchemeKind::noma(0, 1);
    const ScaResult res = sca_solve(ch, budget, params, 0.1, noma, {});
    REQUIRE(res.converged());
    CHECK(res.solution->precoders.private_power(0) == 0.0);
    CHECK(res.solution->common_split[1] == 0.0);
    CHECK(res.solution->private_rate_bounds[0] == 0.0);
    // The served user's QoS rides entirely on the common stream.
    CHECK(res.solution->common_split[0] >= 0.1 - 1e-9);
  }
}

TEST_CASE("scheme selection keeps every candidate and ranks the winner") {
  const ChannelSet ch = random_channels(4, 2, {1.0, 1.0}, 40);
  const PowerBudget budget = PowerBudget::from_snr_db(20.0);
  const BestOfReport rep = solve_best(ch, budget, 1000, 0.25, {}, {});
  REQUIRE(rep.per_scheme.size() == 4);
  REQUIRE(rep.has_winner());
  const double best = rep.selected().solution->objective;
  int converged_count = 0;
  for (const auto& [scheme, res] : rep.per_scheme) {
    if (res.converged() && res.solution) {
      ++converged_count;
      CHECK(best >= res.solution->objective - 1e-12);
    }
  }
  CHECK(converged_count >= 2);
}
