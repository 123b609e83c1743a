#include <cmath>
#include <stdexcept>

#include "hypersim/optics.hpp"
#include "hypersim/protocols.hpp"
#include "hypersim/qdcavity.hpp"

namespace hypersim::protocols {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Matrix hadamard2() {
  Matrix m(2, 2);
  m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return m;
}

Matrix cnot4() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1;  // control 0
  m(2, 3) = m(3, 2) = 1;  // control 1 flips the target
  return m;
}

// |L>_A -> -|L>_A  /  |a2> -> -|a2>
Matrix sign_flip_second() {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = -1;
  return m;
}

}  // namespace

PureState hyper_cnot_ideal(const PureState& photons, const std::string& a,
                           const std::string& b) {
  const SubRef pol_targets[] = {pol(a), pol(b)};
  const SubRef spat_targets[] = {spat(a), spat(b)};
  PureState s = apply_unitary(photons, pol_targets, cnot4());
  return apply_unitary(s, spat_targets, cnot4());
}

ProtocolReport hyper_cnot_state(const PureState& photons, const std::string& a,
                                const std::string& b) {
  ProtocolReport rep;
  rep.protocol = "hyper-cnot";
  PureState ideal = hyper_cnot_ideal(photons, a, b);
  std::vector<SubRef> photon_subset;
  for (const auto& l : photons.layout.labels()) photon_subset.push_back({l.carrier, l.kind});

  PureState s = tensor(photons, qnd::plus_spin_state("e1"));
  s = tensor(s, qnd::plus_spin_state("e2"));
  s = apply_unitary(s, pol(a), hadamard2());
  s = apply_unitary(s, spat(a), hadamard2());
  s = qnd::hybrid_cnot_block(s, a, "e1", "e2", qnd::Pass::First);
  s = qnd::spin_hadamard(s, "e1");
  s = qnd::spin_hadamard(s, "e2");
  s = qnd::hybrid_cnot_block(s, b, "e1", "e2", qnd::Pass::Second);
  s = apply_unitary(s, pol(a), hadamard2());
  s = apply_unitary(s, spat(a), hadamard2());
  s = qnd::spin_hadamard(s, "e1");
  s = qnd::spin_hadamard(s, "e2");

  for (const auto& m1 : qnd::spin_measure(s, "e1", qnd::SpinBasis::UpDown)) {
    for (const auto& m2 : qnd::spin_measure(m1.post, "e2", qnd::SpinBasis::UpDown)) {
      ProtocolBranch br;
      br.outcome = m1.outcome;
      br.outcome.insert(br.outcome.end(), m2.outcome.begin(), m2.outcome.end());
      br.probability = m1.probability * m2.probability;
      br.success = true;
      PureState f = m2.post;
      if (m1.outcome[0].value == "dn") {
        f = apply_unitary(f, pol(a), sign_flip_second());
        br.corrections.push_back("sign[L_" + a + "]");
      }
      if (m2.outcome[0].value == "up") {
        f = apply_unitary(f, spat(a), sign_flip_second());
        br.corrections.push_back("sign[" + a + "2]");
      }
      br.fidelity = fidelity(f, ideal, photon_subset);
      br.post = std::move(f);
      rep.branches.push_back(std::move(br));
    }
  }
  rep.finalize();
  rep.metrics["min_branch_fidelity"] = rep.min_branch_fidelity();
  rep.output_state = rep.branches.front().post;
  return rep;
}

ProtocolReport hyper_cnot(const HyperCnotInput& input) {
  auto normalize2 = [](const Complex* c, const char* name) {
    double n = std::sqrt(std::norm(c[0]) + std::norm(c[1]));
    if (std::abs(n - 1.0) > 1e-9) {
      throw std::invalid_argument(std::string("hyper_cnot: ") + name +
                                  " amplitudes must be normalized");
    }
    return std::pair<Complex, Complex>{c[0] / n, c[1] / n};
  };
  auto [pa0, pa1] = normalize2(input.pol_a, "pol_a");
  auto [sa0, sa1] = normalize2(input.spat_a, "spat_a");
  auto [pb0, pb1] = normalize2(input.pol_b, "pol_b");
  auto [sb0, sb1] = normalize2(input.spat_b, "spat_b");

  SystemLayout layout = pair_layout("A", "B", BasisTag::Circular);
  Vector amp(16);
  const Complex pa[] = {pa0, pa1}, sa[] = {sa0, sa1}, pb[] = {pb0, pb1}, sb[] = {sb0, sb1};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          amp[i * 8 + j * 4 + k * 2 + l] = pa[i] * pb[j] * sa[k] * sb[l];
  return hyper_cnot_state(make_state(layout, amp), "A", "B");
}

}  // namespace hypersim::protocols
