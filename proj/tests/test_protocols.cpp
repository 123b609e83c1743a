#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hypersim/protocols.hpp"

using namespace hypersim;
using namespace hypersim::protocols;

namespace {

std::pair<double, double> random_pair(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double a2 = u(rng);
  return {std::sqrt(a2), std::sqrt(1 - a2)};
}

}  // namespace

TEST_CASE("state factories") {
  SUBCASE("hyper-Bell (phi+, phi+) is the uniform even-index superposition") {
    PureState st = make_hyper_bell({BellKind::PhiPlus, BellKind::PhiPlus}, "A", "B");
    // 1/2 (|HH>+|VV>)(|a1b1>+|a2b2>)
    CHECK(std::abs(st.amp[0] - Complex(0.5)) < 1e-12);          // HH a1b1
    CHECK(std::abs(st.amp[3] - Complex(0.5)) < 1e-12);          // HH a2b2
    CHECK(std::abs(st.amp[12 + 0] - Complex(0.5)) < 1e-12);     // VV a1b1
    CHECK(std::abs(st.amp[12 + 3] - Complex(0.5)) < 1e-12);     // VV a2b2
  }

  SUBCASE("balanced partial parameters give the maximal state") {
    const double s = 1 / std::sqrt(2.0);
    PureState partial = make_partial({s, s, s, s}, "A", "B");
    PureState maximal = make_hyper_bell({BellKind::PhiPlus, BellKind::PhiPlus}, "A", "B");
    CHECK(fidelity(partial, maximal) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("mixed-state weights multiply per DOF") {
    Ensemble ens = make_mixed(0.8, 0.8, "A", "B");
    REQUIRE(ens.members.size() == 4);
    std::vector<double> weights;
    for (const auto& [w, st] : ens.members) weights.push_back(w);
    std::sort(weights.begin(), weights.end());
    CHECK(weights[0] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(weights[1] == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(weights[2] == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(weights[3] == doctest::Approx(0.64).epsilon(1e-12));
  }

  SUBCASE("unnormalized parameters are rejected") {
    CHECK_THROWS_AS(make_partial({0.5, 0.6, 0.6, 0.8}, "A", "B"), std::invalid_argument);
  }
}

TEST_CASE("analysis identifies every hyper-Bell state with certainty") {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      HyperBellLabel label{static_cast<BellKind>(i), static_cast<BellKind>(j)};
      ProtocolReport rep = hbsa(label);
      REQUIRE(rep.branches.size() == 1);
      CHECK(rep.branches[0].probability == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(rep.branches[0].outcome[0].value == to_string(label.pol));
      CHECK(rep.branches[0].outcome[1].value == to_string(label.spat));
      CHECK(rep.metrics.at("label_correct") == 1.0);
    }
  }
}

TEST_CASE("analysis distributes over superposition inputs without error") {
  // (phi+ + psi+)/sqrt2 in polarization, phi+ spatial: two labels, half each
  PureState a = make_hyper_bell({BellKind::PhiPlus, BellKind::PhiPlus}, "A", "B");
  PureState b = make_hyper_bell({BellKind::PsiPlus, BellKind::PhiPlus}, "A", "B");
  Vector amp = (a.amp + b.amp) / std::sqrt(2.0);
  PureState st = make_state(a.layout, amp);
  ProtocolReport rep = hbsa(st, "A", "B");
  REQUIRE(rep.branches.size() == 2);
  for (const auto& br : rep.branches) {
    CHECK(br.probability == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("teleportation") {
  SUBCASE("basis input lands exactly") {
    ProtocolReport rep = teleport({1, 0, 1, 0, {}});
    CHECK(rep.branches.size() == 16);
    CHECK(rep.branch_probability_sum() == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& b : rep.branches) {
      CHECK(b.fidelity == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(b.probability == doctest::Approx(1.0 / 16).epsilon(1e-9));
    }
  }

  SUBCASE("random inputs: unit fidelity on all sixteen outcomes") {
    std::mt19937 rng(53);
    for (int it = 0; it < 10; ++it) {
      auto [al, be] = random_pair(rng);
      auto [ga, de] = random_pair(rng);
      ProtocolReport rep = teleport({al, be, ga, de, {}});
      REQUIRE(rep.branches.size() == 16);
      for (const auto& b : rep.branches) {
        CHECK(b.fidelity >= 1.0 - 1e-9);
        CHECK(b.probability == doctest::Approx(1.0 / 16).epsilon(1e-9));
      }
    }
  }

  SUBCASE("a partial channel degrades fidelity but still reports") {
    TeleportParams p{1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1, 0, {0.9, std::sqrt(1 - 0.81), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}};
    ProtocolReport rep = teleport(p);
    CHECK(rep.branch_probability_sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.min_branch_fidelity() < 1.0 - 1e-6);
  }

  SUBCASE("unnormalized input is rejected") {
    CHECK_THROWS_AS(teleport({0.9, 0.9, 1, 0, {}}), std::invalid_argument);
  }
}

TEST_CASE("entanglement swapping ends in phi+ for every outcome") {
  ProtocolReport rep = swap_pairs();
  REQUIRE(rep.branches.size() == 16);
  CHECK(rep.branch_probability_sum() == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& b : rep.branches) {
    CHECK(b.fidelity >= 1.0 - 1e-9);
    CHECK(b.probability == doctest::Approx(1.0 / 16).epsilon(1e-9));
  }

  // spot-check the published correction rules
  for (const auto& b : rep.branches) {
    if (b.outcome[0].value == "phi-" && b.outcome[1].value == "phi+") {
      REQUIRE(b.corrections.size() == 1);
      CHECK(b.corrections[0] == "sigma_z_pol[A]");
    }
    if (b.outcome[0].value == "psi+" && b.outcome[1].value == "psi+") {
      REQUIRE(b.corrections.size() == 2);
      CHECK(b.corrections[0] == "sigma_x_pol[A]");
      CHECK(b.corrections[1] == "sigma_x_spat[A]");
    }
  }
}

TEST_CASE("hyperparallel CNOT") {
  SUBCASE("control L flips both targets") {
    HyperCnotInput in;
    in.pol_a[0] = 0;
    in.pol_a[1] = 1;  // |L>_A
    in.spat_a[0] = 0;
    in.spat_a[1] = 1;  // |a2>
    ProtocolReport rep = hyper_cnot(in);
    REQUIRE(rep.branches.size() == 4);
    for (const auto& b : rep.branches) {
      CHECK(b.probability == doctest::Approx(0.25).epsilon(1e-9));
      CHECK(b.fidelity >= 1.0 - 1e-9);
    }
    // output should be |L L>(|a2 b2>) exactly
    const PureState& out = *rep.branches.front().post;
    PureState expect = hyper_cnot_ideal(
        [] {
          SystemLayout l = pair_layout("A", "B", BasisTag::Circular);
          Vector amp = Vector::Zero(16);
          amp[1 * 8 + 0 * 4 + 1 * 2 + 0] = 1;  // L_A R_B a2 b1
          return make_state(l, amp);
        }(),
        "A", "B");
    CHECK(fidelity(out, expect) == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("control R leaves the targets alone") {
    HyperCnotInput in;  // all basis-0
    ProtocolReport rep = hyper_cnot(in);
    for (const auto& b : rep.branches) CHECK(b.fidelity >= 1.0 - 1e-9);
  }

  SUBCASE("random superpositions match the ideal gate in every branch") {
    std::mt19937 rng(59);
    std::normal_distribution<double> n;
    for (int it = 0; it < 20; ++it) {
      auto rnd2 = [&](Complex* c) {
        c[0] = Complex(n(rng), n(rng));
        c[1] = Complex(n(rng), n(rng));
        double nn = std::sqrt(std::norm(c[0]) + std::norm(c[1]));
        c[0] /= nn;
        c[1] /= nn;
      };
      HyperCnotInput in;
      rnd2(in.pol_a);
      rnd2(in.spat_a);
      rnd2(in.pol_b);
      rnd2(in.spat_b);
      ProtocolReport rep = hyper_cnot(in);
      CHECK(rep.branch_probability_sum() == doctest::Approx(1.0).epsilon(1e-9));
      for (const auto& b : rep.branches) CHECK(b.fidelity >= 1.0 - 1e-9);
    }
  }

  SUBCASE("induced operator equals CNOT x CNOT up to a global phase") {
    // columns collected per spin outcome over all sixteen basis inputs
    for (int e1 = 0; e1 < 2; ++e1) {
      for (int e2 = 0; e2 < 2; ++e2) {
        std::string want1 = e1 ? "dn" : "up";
        std::string want2 = e2 ? "dn" : "up";
        Matrix op = Matrix::Zero(16, 16);
        Matrix ideal = Matrix::Zero(16, 16);
        SystemLayout layout = pair_layout("A", "B", BasisTag::Circular);
        for (int col = 0; col < 16; ++col) {
          Vector amp = Vector::Zero(16);
          amp[col] = 1;
          PureState in = make_state(layout, amp);
          ideal.col(col) = hyper_cnot_ideal(in, "A", "B").amp;
          ProtocolReport rep = hyper_cnot_state(in, "A", "B");
          for (const auto& b : rep.branches) {
            if (b.outcome[0].value == want1 && b.outcome[1].value == want2) {
              op.col(col) = std::sqrt(b.probability * 4.0) * b.post->amp;
            }
          }
        }
        // align the global phase on the largest ideal entry
        Eigen::Index r0 = 0, c0 = 0;
        ideal.cwiseAbs().maxCoeff(&r0, &c0);
        Complex phase = op(r0, c0) / ideal(r0, c0);
        CHECK(std::abs(std::abs(phase) - 1.0) < 1e-9);
        CHECK(max_abs(op - phase * ideal) < 1e-9);
      }
    }
  }
}
