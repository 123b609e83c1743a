#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypersim/optics.hpp"
#include "hypersim/protocols.hpp"

using namespace hypersim;
using namespace hypersim::protocols;

TEST_CASE("first purification step at F1 = F2 = 0.8") {
  EppStep1Result res = hyper_epp_step1(0.8, 0.8);
  const auto& m = res.report.metrics;

  SUBCASE("case probabilities") {
    CHECK(m.at("p_case_1") == doctest::Approx(0.4624).epsilon(1e-9));
    CHECK(m.at("p_case_2") == doctest::Approx(0.32 * 0.32).epsilon(1e-9));
    CHECK(m.at("p_case_3") == doctest::Approx(0.68 * 0.32).epsilon(1e-9));
    CHECK(m.at("p_case_4") == doctest::Approx(0.32 * 0.68).epsilon(1e-9));
    CHECK(res.report.branch_probability_sum() == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("case 1 improves both DOFs to 16/17") {
    CHECK(res.cases[0].pol_fidelity == doctest::Approx(16.0 / 17.0).epsilon(1e-9));
    CHECK(res.cases[0].spat_fidelity == doctest::Approx(16.0 / 17.0).epsilon(1e-9));
  }

  SUBCASE("case 3 keeps polarization, spatial collapses to one half") {
    CHECK(res.cases[2].pol_fidelity == doctest::Approx(16.0 / 17.0).epsilon(1e-9));
    CHECK(res.cases[2].spat_fidelity == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("case 4 is the mirror image") {
    CHECK(res.cases[3].pol_fidelity == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res.cases[3].spat_fidelity == doctest::Approx(16.0 / 17.0).epsilon(1e-9));
  }

  SUBCASE("case 2 keeps nothing") {
    CHECK(!res.cases[1].ensemble.has_value());
    for (const auto& b : res.report.branches) {
      if (b.case_label == "case-2") CHECK(!b.success);
    }
  }

  SUBCASE("enumerated efficiencies match the closed forms") {
    CHECK(m.at("y0_enumerated") == doctest::Approx(m.at("form_y0")).epsilon(1e-9));
    CHECK(m.at("y_enumerated") == doctest::Approx(m.at("form_y")).epsilon(1e-9));
    CHECK(m.at("form_y0") == doctest::Approx(0.4624).epsilon(1e-12));
    CHECK(m.at("form_y") == doctest::Approx(0.68).epsilon(1e-12));
  }
}

TEST_CASE("first step on asymmetric fidelities") {
  EppStep1Result res = hyper_epp_step1(0.9, 0.7);
  const auto& m = res.report.metrics;
  double e1 = 0.9 * 0.9 + 0.1 * 0.1, e2 = 0.7 * 0.7 + 0.3 * 0.3;
  CHECK(m.at("p_case_1") == doctest::Approx(e1 * e2).epsilon(1e-9));
  CHECK(res.cases[0].pol_fidelity == doctest::Approx(0.81 / e1).epsilon(1e-9));
  CHECK(res.cases[0].spat_fidelity == doctest::Approx(0.49 / e2).epsilon(1e-9));
  // paper formula for F1 > F2
  CHECK(m.at("form_y") == doctest::Approx(e2).epsilon(1e-12));
  CHECK(m.at("y_enumerated") == doctest::Approx(e2).epsilon(1e-9));
}

TEST_CASE("ensembles outside the modeled error family are rejected by name") {
  Ensemble bad = make_mixed(0.8, 0.8, "A", "B", MixedErrorModel::General);
  Ensemble good = make_mixed(0.8, 0.8, "C", "D");
  CHECK_THROWS_WITH_AS(hyper_epp_step1(bad, good), doctest::Contains("outside"),
                       std::invalid_argument);
}

TEST_CASE("second step recovers the case-1 output from cases 3 and 4") {
  EppStep1Result s1 = hyper_epp_step1(0.8, 0.8);
  ProtocolReport rep = hyper_epp_step2(s1.cases[2], s1.cases[3]);
  CHECK(rep.metrics.at("pol_fidelity") ==
        doctest::Approx(s1.cases[0].pol_fidelity).epsilon(1e-9));
  CHECK(rep.metrics.at("spat_fidelity") ==
        doctest::Approx(s1.cases[0].spat_fidelity).epsilon(1e-9));

  SUBCASE("argument order does not matter") {
    ProtocolReport swapped = hyper_epp_step2(s1.cases[3], s1.cases[2]);
    CHECK(swapped.metrics.at("pol_fidelity") ==
          doctest::Approx(rep.metrics.at("pol_fidelity")).epsilon(1e-9));
    CHECK(swapped.metrics.at("spat_fidelity") ==
          doctest::Approx(rep.metrics.at("spat_fidelity")).epsilon(1e-9));
  }

  SUBCASE("same-case inputs are rejected") {
    CHECK_THROWS_AS(hyper_epp_step2(s1.cases[2], s1.cases[2]), std::invalid_argument);
    CHECK_THROWS_AS(hyper_epp_step2(s1.cases[0], s1.cases[2]), std::invalid_argument);
  }
}

TEST_CASE("closed-form iteration") {
  SUBCASE("one round from 0.8") {
    ProtocolReport rep = hyper_epp_full(0.8, 0.8, 1);
    CHECK(rep.metrics.at("f1_round_1") == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
    CHECK(rep.metrics.at("y0") == doctest::Approx(0.4624).epsilon(1e-12));
    CHECK(rep.metrics.at("y") == doctest::Approx(0.68).epsilon(1e-12));
  }

  SUBCASE("three rounds push the fidelity past 0.9999") {
    ProtocolReport rep = hyper_epp_full(0.8, 0.8, 3);
    CHECK(rep.metrics.at("f1_round_3") > 0.9999);
    // strictly increasing per round
    CHECK(rep.metrics.at("f1_round_1") > 0.8);
    CHECK(rep.metrics.at("f1_round_2") > rep.metrics.at("f1_round_1"));
    CHECK(rep.metrics.at("f1_round_3") > rep.metrics.at("f1_round_2"));
  }

  SUBCASE("efficiency ordering Y >= Y0 and the F1 < F2 extension") {
    ProtocolReport rep = hyper_epp_full(0.7, 0.9, 1);
    CHECK(rep.metrics.at("y") >= rep.metrics.at("y0"));
    CHECK(rep.metrics.at("y_is_extension") == 1.0);
    CHECK(rep.metrics.at("y") == doctest::Approx(0.7 * 0.7 + 0.3 * 0.3).epsilon(1e-12));
  }

  SUBCASE("fidelities at or below one half are rejected") {
    CHECK_THROWS_AS(hyper_epp_full(0.5, 0.8, 1), std::invalid_argument);
    CHECK_THROWS_AS(hyper_epp_full(0.8, 0.3, 1), std::invalid_argument);
  }
}

TEST_CASE("first-step output feeds a second enumerated round") {
  // map the case-1 output back to the phase-flip error family with spatial
  // plates, rerun the enumerated step, and compare with the closed form
  EppStep1Result s1 = hyper_epp_step1(0.8, 0.8);
  REQUIRE(s1.cases[0].ensemble.has_value());

  auto remap = [](const Ensemble& e, const std::string& nx, const std::string& ny) {
    std::vector<std::pair<double, PureState>> members;
    for (const auto& [w, st] : e.members) {
      std::vector<SubsystemLabel> labels = st.layout.labels();
      std::string ox = labels[0].carrier, oy = labels[1].carrier;
      for (auto& l : labels) l.carrier = (l.carrier == ox) ? nx : ny;
      PureState renamed{SystemLayout(labels), st.amp};
      renamed = optics::hadamard_spatial(renamed, nx);
      renamed = optics::hadamard_spatial(renamed, ny);
      members.push_back({w, renamed});
    }
    return mix(members);
  };

  Ensemble ab = remap(*s1.cases[0].ensemble, "A", "B");
  Ensemble cd = remap(*s1.cases[0].ensemble, "C", "D");
  EppStep1Result s2 = hyper_epp_step1(ab, cd);

  double f = 16.0 / 17.0;
  double expect = f * f / (f * f + (1 - f) * (1 - f));
  CHECK(s2.cases[0].pol_fidelity == doctest::Approx(expect).epsilon(1e-9));
  CHECK(s2.cases[0].spat_fidelity == doctest::Approx(expect).epsilon(1e-9));
  double e = f * f + (1 - f) * (1 - f);
  CHECK(s2.cases[0].probability == doctest::Approx(e * e).epsilon(1e-9));
}
