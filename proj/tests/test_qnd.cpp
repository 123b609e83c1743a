#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hypersim/qdcavity.hpp"
#include "hypersim/states.hpp"
#include "hypersim/xkerr.hpp"

using namespace hypersim;
using namespace hypersim::qnd;
using protocols::BellKind;
using protocols::HyperBellLabel;
using protocols::bell_vector;
using protocols::make_hyper_bell;
using protocols::make_partial;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PureState plus_spin(const std::string& carrier) {
  Vector amp(2);
  amp << kInvSqrt2, kInvSqrt2;
  return make_state(SystemLayout({spin(carrier)}), amp);
}

// Direct projector arithmetic oracle: probability mass of the given parity
// on two two-level subsystems, summed straight from the amplitudes.
double parity_mass_oracle(const PureState& st, const SubRef& x, const SubRef& y,
                          bool even) {
  int ix = st.layout.index_of(x), iy = st.layout.index_of(y);
  double m = 0;
  for (Eigen::Index g = 0; g < st.amp.size(); ++g) {
    bool is_even = st.layout.digit(g, ix) == st.layout.digit(g, iy);
    if (is_even == even) m += std::norm(st.amp[g]);
  }
  return m;
}

}  // namespace

TEST_CASE("polarization parity QND leaves the spatial factor alone") {
  PureState st = make_hyper_bell({BellKind::PhiPlus, BellKind::PhiPlus}, "A", "B");
  auto branches = xkerr_parity_pol(st, "A", "B");
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].outcome[0].value == "shifted");
  CHECK(branches[0].probability == doctest::Approx(1.0));
  // spatial factor untouched: overlap with the input stays 1
  Complex ov = st.amp.adjoint() * branches[0].post.amp;
  CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("psi- polarization pair is unshifted") {
  SystemLayout layout = register_layout({pol_linear("A"), pol_linear("B")});
  PureState st = make_state(layout, bell_vector(BellKind::PsiMinus));
  auto branches = xkerr_parity_pol(st, "A", "B");
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].outcome[0].value == "unshifted");
}

TEST_CASE("two identical partial pairs: parity case probabilities") {
  // no pre-flips: even mass alpha^4+beta^4, odd mass 2 alpha^2 beta^2
  protocols::PartialHyperParams p{0.8, 0.6, 0.6, 0.8};
  PureState st = tensor(make_partial(p, "A", "B"), make_partial(p, "C", "D"));
  double a2 = 0.64, b2 = 0.36;

  auto branches = xkerr_parity_pol(st, "A", "C");
  double p_even = 0, p_odd = 0;
  for (const auto& b : branches) {
    (b.outcome[0].value == "shifted" ? p_even : p_odd) = b.probability;
  }
  CHECK(p_even == doctest::Approx(a2 * a2 + b2 * b2).epsilon(1e-12));
  CHECK(p_odd == doctest::Approx(2 * a2 * b2).epsilon(1e-12));
  CHECK(p_even == doctest::Approx(parity_mass_oracle(st, pol("A"), pol("C"), true)));

  // spatial parity of (B,D) likewise with gamma, delta
  double c2 = 0.36, d2 = 0.64;
  auto sb = xkerr_parity_spatial(st, "B", "D");
  double s_even = 0, s_odd = 0;
  for (const auto& b : sb) {
    (b.outcome[0].value == "shifted" ? s_even : s_odd) = b.probability;
  }
  CHECK(s_even == doctest::Approx(c2 * c2 + d2 * d2).epsilon(1e-12));
  CHECK(s_odd == doctest::Approx(2 * c2 * d2).epsilon(1e-12));
}

TEST_CASE("spatial parity QND on Bell inputs") {
  SystemLayout layout = register_layout({spatial("A"), spatial("B")});
  auto shifted = xkerr_parity_spatial(make_state(layout, bell_vector(BellKind::PhiMinus)),
                                      "A", "B");
  REQUIRE(shifted.size() == 1);
  CHECK(shifted[0].outcome[0].value == "shifted");

  auto unshifted = xkerr_parity_spatial(make_state(layout, bell_vector(BellKind::PsiPlus)),
                                        "A", "B");
  REQUIRE(unshifted.size() == 1);
  CHECK(unshifted[0].outcome[0].value == "unshifted");

  Vector amp = Vector::Zero(4);
  amp[0] = amp[1] = kInvSqrt2;  // (|a1b1>+|a1b2>)/sqrt2
  auto both = xkerr_parity_spatial(make_state(layout, amp), "A", "B");
  REQUIRE(both.size() == 2);
  CHECK(both[0].probability == doctest::Approx(0.5));
  CHECK(both[1].probability == doctest::Approx(0.5));
}

TEST_CASE("parity projections never disturb amplitudes inside a subspace") {
  std::mt19937 rng(31);
  std::normal_distribution<double> n;
  SystemLayout layout =
      register_layout({pol_linear("A"), pol_linear("B"), spatial("A"), spatial("B")});
  for (int it = 0; it < 25; ++it) {
    Vector amp(16);
    for (int i = 0; i < 16; ++i) amp[i] = Complex(n(rng), n(rng));
    amp /= amp.norm();
    PureState st = make_state(layout, amp);
    for (const auto& b : xkerr_parity_pol(st, "A", "B")) {
      bool even = b.outcome[0].value == "shifted";
      int ia = st.layout.index_of(pol("A")), ib = st.layout.index_of(pol("B"));
      double scale = std::sqrt(b.probability);
      for (Eigen::Index g = 0; g < amp.size(); ++g) {
        bool g_even = st.layout.digit(g, ia) == st.layout.digit(g, ib);
        Complex expect = g_even == even ? amp[g] / scale : Complex(0, 0);
        CHECK(std::abs(b.post.amp[g] - expect) < 1e-9);
      }
    }
  }
}

TEST_CASE("spatial analyzer resolves the four joint modes") {
  SystemLayout layout = register_layout({spatial("A"), spatial("B")});

  SUBCASE("phi+ after the mixers lands on the same-index classes") {
    PureState st = make_state(layout, bell_vector(BellKind::PhiPlus));
    Matrix h(2, 2);
    h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    st = apply_unitary(st, spat("A"), h);
    st = apply_unitary(st, spat("B"), h);
    auto branches = xkerr_spatial_analyzer(st, "A", "B");
    REQUIRE(branches.size() == 2);
    for (const auto& b : branches) {
      CHECK(b.probability == doctest::Approx(0.5).epsilon(1e-12));
      std::string modes = analyzer_modes(b.outcome[0].value);
      CHECK(modes[0] == modes[1]);
    }
  }

  SUBCASE("a definite joint mode gives its phase class with certainty") {
    auto branches = xkerr_spatial_analyzer(basis_state(layout, {0, 1}), "A", "B");
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].outcome[0].value == "theta1+theta4");
  }

  SUBCASE("branch probabilities sum to 1 on random input") {
    std::mt19937 rng(37);
    std::normal_distribution<double> n;
    Vector amp(4);
    for (int i = 0; i < 4; ++i) amp[i] = Complex(n(rng), n(rng));
    amp /= amp.norm();
    double total = 0;
    for (const auto& b : xkerr_spatial_analyzer(make_state(layout, amp), "A", "B")) {
      total += b.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cavity reflection and transmission coefficients") {
  SUBCASE("r = 1 + t on random parameter draws") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int it = 0; it < 1000; ++it) {
      CavityParams p{u(rng), 0.5 + u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
      auto [r, t] = qd_coefficients(p);
      CHECK(std::abs(r - Complex(1.0) - t) < 1e-12);
    }
  }

  SUBCASE("uncoupled resonant cavity transmits with a sign") {
    CavityParams p{0, 1, 0, 0.2, 0, 0, 0};
    auto [r, t] = qd_coefficients(p);
    CHECK(std::abs(t - Complex(-1.0)) < 1e-12);
    CHECK(std::abs(r) < 1e-12);
  }

  SUBCASE("g = 2 kappa, gamma = 0.1 kappa at resonance") {
    CavityParams p{2, 1, 0, 0.1, 0, 0, 0};
    auto [r, t] = qd_coefficients(p);
    CHECK(t.real() == doctest::Approx(-0.0123456790).epsilon(1e-9));
    CHECK(std::abs(t.imag()) < 1e-12);
    CHECK(r.real() == doctest::Approx(0.9876543210).epsilon(1e-9));
  }

  SUBCASE("vanishing response denominator is rejected") {
    CavityParams p{0, 1, 0, 0, 0, 0, 0};
    // kappa > 0 but gamma = g = 0 at resonance: t = 0/0
    CHECK_THROWS_AS(qd_coefficients(p), std::invalid_argument);
  }
}

TEST_CASE("ideal scattering rules") {
  SystemLayout layout = register_layout({pol_circular("P"), spatial("P"), spin("e")});

  SUBCASE("the two quoted rules") {
    // |R, i2>|up> -> |L, i2>|up>
    PureState a = qd_scatter_ideal(basis_state(layout, {0, 1, 0}), "P", "e");
    CHECK(std::abs(a.amp[1 * 4 + 1 * 2 + 0] - Complex(1.0)) < 1e-12);
    // |L, i1>|dn> -> -|L, i2>|dn>
    PureState b = qd_scatter_ideal(basis_state(layout, {1, 0, 1}), "P", "e");
    CHECK(std::abs(b.amp[1 * 4 + 1 * 2 + 1] - Complex(-1.0)) < 1e-12);
  }

  SUBCASE("the rule matrix is unitary") {
    Matrix s = qd_scatter_matrix();
    CHECK(max_abs(s * s.adjoint() - Matrix::Identity(8, 8)) < 1e-12);
  }

  SUBCASE("linear-basis polarization is rejected") {
    SystemLayout lin = register_layout({pol_linear("P"), spatial("P"), spin("e")});
    CHECK_THROWS_AS(qd_scatter_ideal(basis_state(lin, {0, 0, 0}), "P", "e"),
                    std::invalid_argument);
  }
}

TEST_CASE("polarization pass composes to a spin-controlled flip") {
  // the CPBS/U/cavity/U/CPBS/X chain must give: spin up -> identity,
  // spin down -> sigma_x on the polarization, no residual signs
  Matrix m = qd_pol_pass_matrix();
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 1;  // R,up
  expect(3, 1) = 1;  // R,dn -> L,dn
  expect(2, 2) = 1;  // L,up
  expect(1, 3) = 1;  // L,dn -> R,dn
  CHECK(max_abs(m - expect) < 1e-12);
  CHECK(is_unitary(m, 1e-12));
}

TEST_CASE("spatial pass variants are unitary") {
  CHECK(is_unitary(qd_spatial_pass_matrix(Pass::First), 1e-12));
  CHECK(is_unitary(qd_spatial_pass_matrix(Pass::Second), 1e-12));
}

TEST_CASE("one traversal reproduces the four-qubit hybrid gate state") {
  std::mt19937 rng(43);
  std::normal_distribution<double> n;
  for (int it = 0; it < 20; ++it) {
    // random real photon amplitudes (the stated form uses real ones)
    double a1 = n(rng), a2 = n(rng), g1 = n(rng), g2 = n(rng);
    double na = std::sqrt(a1 * a1 + a2 * a2), ng = std::sqrt(g1 * g1 + g2 * g2);
    a1 /= na;
    a2 /= na;
    g1 /= ng;
    g2 /= ng;
    SystemLayout pl = register_layout({pol_circular("A"), spatial("A")});
    Vector pamp(4);
    pamp << a1 * g1, a1 * g2, a2 * g1, a2 * g2;
    PureState photon = make_state(pl, pamp);
    PureState st = tensor(tensor(photon, plus_spin("e1")), plus_spin("e2"));
    PureState out = hybrid_cnot_block(st, "A", "e1", "e2", Pass::First);

    // expected: 1/2 [up (a1 R + a2 L) + dn (a2 R + a1 L)]
    //             x [up (g2 a1 + g1 a2) - dn (g1 a1 + g2 a2)]
    Vector pol_part(4), spat_part(4);  // (pol, e1), (spat, e2)
    pol_part << a1, a2, a2, a1;        // R up, R dn, L up, L dn
    spat_part << g2, -g1, g1, -g2;     // a1 up, a1 dn, a2 up, a2 dn
    Vector expect(16);
    // layout order: pol A, spat A, e1, e2
    for (int p = 0; p < 2; ++p)
      for (int s = 0; s < 2; ++s)
        for (int e1 = 0; e1 < 2; ++e1)
          for (int e2 = 0; e2 < 2; ++e2)
            expect[p * 8 + s * 4 + e1 * 2 + e2] =
                0.5 * pol_part[p * 2 + e1] * spat_part[s * 2 + e2];
    CHECK((out.amp - expect).norm() < 1e-10);
  }
}

TEST_CASE("deterministic product input runs through the block") {
  SystemLayout pl = register_layout({pol_circular("A"), spatial("A")});
  PureState photon = basis_state(pl, {0, 0});  // |R, a1>
  SystemLayout sl = register_layout({spin("e1"), spin("e2")});
  PureState spins = basis_state(sl, {0, 0});  // |up, up>
  PureState st = tensor(photon, spins);
  PureState out = hybrid_cnot_block(st, "A", "e1", "e2", Pass::First);
  // up spin1: polarization unchanged; up spin2: ports swap
  CHECK(std::abs(out.amp[0 * 8 + 1 * 4 + 0 * 2 + 0] - Complex(1.0)) < 1e-12);
  CHECK(std::abs(out.amp.norm() - 1.0) < 1e-12);
}

TEST_CASE("phase-check QND readout table over all 16 inputs") {
  // the relative sign of each Bell state is read out directly:
  // e1 = +  <=>  polarization phase 0,  e2 = -  <=>  spatial phase 0
  auto phase_of = [](BellKind k) {
    return (k == BellKind::PhiPlus || k == BellKind::PsiPlus) ? "0" : "pi";
  };
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      BellKind pk = static_cast<BellKind>(i), sk = static_cast<BellKind>(j);
      PureState photons = make_hyper_bell({pk, sk}, "A", "B", BasisTag::Circular);
      PureState st = tensor(tensor(photons, plus_spin("e1")), plus_spin("e2"));
      auto outcomes = ps_qnd(st, "A", "B", "e1", "e2");
      REQUIRE(outcomes.size() == 1);
      CHECK(outcomes[0].pol_phase == phase_of(pk));
      CHECK(outcomes[0].spat_phase == phase_of(sk));
      CHECK(outcomes[0].probability == doctest::Approx(1.0).epsilon(1e-9));
      // nondestructive: photonic state unchanged
      CHECK(fidelity(outcomes[0].post, photons) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("parity-check QND on basis products") {
  // |RR> x |a1 b2>: even polarization parity, odd spatial parity
  SystemLayout layout = register_layout(
      {pol_circular("A"), pol_circular("B"), spatial("A"), spatial("B")});
  PureState photons = basis_state(layout, {0, 0, 0, 1});
  PureState st = tensor(tensor(photons, plus_spin("e1")), plus_spin("e2"));
  auto outcomes = ps_parity_qnd(st, "A", "B", "e1", "e2");
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].pol_parity == "even");
  CHECK(outcomes[0].spat_parity == "odd");
  CHECK(fidelity(outcomes[0].post, photons) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("parity-check QND equals the direct projective parity oracle") {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      HyperBellLabel label{static_cast<BellKind>(i), static_cast<BellKind>(j)};
      PureState photons = make_hyper_bell(label, "A", "B", BasisTag::Circular);
      PureState st = tensor(tensor(photons, plus_spin("e1")), plus_spin("e2"));
      auto outcomes = ps_parity_qnd(st, "A", "B", "e1", "e2");
      REQUIRE(outcomes.size() == 1);
      double even_pol = parity_mass_oracle(photons, pol("A"), pol("B"), true);
      double even_spat = parity_mass_oracle(photons, spat("A"), spat("B"), true);
      CHECK(outcomes[0].pol_parity == (even_pol > 0.5 ? "even" : "odd"));
      CHECK(outcomes[0].spat_parity == (even_spat > 0.5 ? "even" : "odd"));
      CHECK(fidelity(outcomes[0].post, photons) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("DOF swap exchanges polarization and path amplitudes") {
  SystemLayout layout = register_layout({pol_circular("A"), spatial("A")});
  Vector amp(4);
  amp << 0.6 * 0.28, 0.6 * 0.96, 0.8 * 0.28, 0.8 * 0.96;  // (0.6,0.8) x (0.28,0.96)
  PureState st = make_state(layout, amp);
  PureState out = dof_swap(st, "A");
  Vector expect(4);
  expect << 0.28 * 0.6, 0.28 * 0.8, 0.96 * 0.6, 0.96 * 0.8;
  CHECK((out.amp - expect).norm() < 1e-12);

  SUBCASE("moves entanglement between the DOFs") {
    // pol-entangled pair: phi+_P x |a1 b1>  ->  |RR> x phi+_S
    SystemLayout pl = register_layout(
        {pol_circular("A"), pol_circular("B"), spatial("A"), spatial("B")});
    Vector v = Vector::Zero(16);
    v[0 * 8 + 0 * 4 + 0 * 2 + 0] = 1 / std::sqrt(2.0);  // RR a1 b1
    v[1 * 8 + 1 * 4 + 0 * 2 + 0] = 1 / std::sqrt(2.0);  // LL a1 b1
    PureState pair = make_state(pl, v);
    PureState swapped = dof_swap(dof_swap(pair, "A"), "B");
    Vector w = Vector::Zero(16);
    w[0] = 1 / std::sqrt(2.0);                           // RR a1 b1
    w[0 * 8 + 0 * 4 + 1 * 2 + 1] = 1 / std::sqrt(2.0);  // RR a2 b2
    CHECK((swapped.amp - w).norm() < 1e-12);
  }

  SUBCASE("self-inverse") {
    PureState back = dof_swap(dof_swap(st, "A"), "A");
    CHECK((back.amp - st.amp).norm() < 1e-12);
  }
}

TEST_CASE("state joining transfers the polarization deterministically") {
  SUBCASE("stated example: all four branches agree") {
    SystemLayout la = register_layout({pol_circular("A")});
    Vector aam(2);
    aam << 0.6, 0.8;
    PureState pa = make_state(la, aam);
    SystemLayout lb = register_layout({pol_circular("B"), spatial("B")});
    Vector bam(4);
    bam << 0.8, 0.6, 0, 0;  // |R>(0.8|b1>+0.6|b2>)
    PureState pb = make_state(lb, bam);
    PureState st = tensor(tensor(pa, pb), plus_spin("e"));

    SystemLayout lt = register_layout({pol_circular("B"), spatial("B")});
    Vector tam(4);
    tam << 0.6 * 0.8, 0.6 * 0.6, 0.8 * 0.8, 0.8 * 0.6;
    PureState target = make_state(lt, tam);

    auto branches = qsjm(st, "A", "B", "e");
    double total = 0;
    for (const auto& b : branches) {
      total += b.probability;
      CHECK(fidelity(b.post, target) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("basis input") {
    SystemLayout la = register_layout({pol_circular("A")});
    PureState pa = basis_state(la, {0});  // |R>
    SystemLayout lb = register_layout({pol_circular("B")});
    Vector bam(2);
    bam << 0.28, 0.96;
    PureState pb = make_state(lb, bam);
    PureState st = tensor(tensor(pa, pb), plus_spin("e"));
    PureState target = basis_state(lb, {0});
    for (const auto& b : qsjm(st, "A", "B", "e")) {
      CHECK(fidelity(b.post, target) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("four equal branches for balanced bases") {
    SystemLayout la = register_layout({pol_circular("A")});
    Vector aam(2);
    aam << 0.6, 0.8;
    PureState pa = make_state(la, aam);
    SystemLayout lb = register_layout({pol_circular("B")});
    Vector bam(2);
    bam << kInvSqrt2, kInvSqrt2;
    PureState pb = make_state(lb, bam);
    PureState st = tensor(tensor(pa, pb), plus_spin("e"));
    auto branches = qsjm(st, "A", "B", "e");
    REQUIRE(branches.size() == 4);
    for (const auto& b : branches) {
      CHECK(b.probability == doctest::Approx(0.25).epsilon(1e-9));
    }
  }

  SUBCASE("random coefficient draws, all branches exact") {
    std::mt19937 rng(47);
    std::normal_distribution<double> n;
    for (int it = 0; it < 100; ++it) {
      Complex a0(n(rng), n(rng)), a1(n(rng), n(rng));
      double na = std::sqrt(std::norm(a0) + std::norm(a1));
      a0 /= na;
      a1 /= na;
      Complex b0(n(rng), n(rng)), b1(n(rng), n(rng));
      double nb = std::sqrt(std::norm(b0) + std::norm(b1));
      b0 /= nb;
      b1 /= nb;
      SystemLayout la = register_layout({pol_circular("A")});
      Vector aam(2);
      aam << a0, a1;
      SystemLayout lb = register_layout({pol_circular("B")});
      Vector bam(2);
      bam << b0, b1;
      PureState st = tensor(tensor(make_state(la, aam), make_state(lb, bam)),
                            plus_spin("e"));
      PureState target = make_state(lb, aam);
      for (const auto& b : qsjm(st, "A", "B", "e")) {
        CHECK(fidelity(b.post, target) == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}
