#include "hypersim/qdcavity.hpp"

#include <cmath>
#include <stdexcept>

#include "hypersim/optics.hpp"

namespace hypersim::qnd {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

Matrix hadamard2() {
  Matrix m(2, 2);
  m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return m;
}

void require_circular(const PureState& state, const std::string& photon,
                      const char* where) {
  int i = state.layout.index_of(pol(photon));
  if (state.layout.label(i).tag != BasisTag::Circular) {
    throw std::invalid_argument(std::string(where) + ": " + photon +
                                " polarization must carry the circular basis");
  }
}

void require_two_port(const PureState& state, const std::string& photon,
                      const char* where) {
  int i = state.layout.index_of(spat(photon));
  if (state.layout.label(i).dim != 2) {
    throw std::invalid_argument(std::string(where) + ": " + photon +
                                " spatial register must be two-port");
  }
}

}  // namespace

std::pair<Complex, Complex> qd_coefficients(const CavityParams& p) {
  if (p.kappa <= 0) throw std::invalid_argument("qd_coefficients: kappa must be > 0");
  if (p.g < 0 || p.kappa_s < 0 || p.gamma < 0) {
    throw std::invalid_argument("qd_coefficients: rates must be >= 0");
  }
  Complex dx = kI * (p.omega_x - p.omega) + p.gamma / 2.0;
  Complex dc = kI * (p.omega_c - p.omega) + p.kappa + p.kappa_s / 2.0;
  Complex denom = dx * dc + p.g * p.g;
  if (std::abs(denom) < 1e-30) {
    throw std::invalid_argument("qd_coefficients: response denominator vanishes");
  }
  Complex t = -p.kappa * dx / denom;
  return {Complex(1.0, 0.0) + t, t};
}

Matrix qd_scatter_matrix() {
  // basis index = 4*pol + 2*port + spin, pol {R=0,L=1}, port {i1=0,i2=1},
  // spin {up=0,dn=1}
  Matrix s = Matrix::Zero(8, 8);
  auto idx = [](int p, int m, int e) { return 4 * p + 2 * m + e; };
  // spin up: coupled inputs reflect with a polarization flip, uncoupled
  // transmit with a sign
  s(idx(1, 1, 0), idx(0, 1, 0)) = 1;   // R,i2,up -> L,i2,up
  s(idx(0, 0, 0), idx(1, 0, 0)) = 1;   // L,i1,up -> R,i1,up
  s(idx(0, 1, 0), idx(0, 0, 0)) = -1;  // R,i1,up -> -R,i2,up
  s(idx(1, 0, 0), idx(1, 1, 0)) = -1;  // L,i2,up -> -L,i1,up
  // spin down: mirrored roles
  s(idx(0, 0, 1), idx(0, 1, 1)) = -1;  // R,i2,dn -> -R,i1,dn
  s(idx(1, 1, 1), idx(1, 0, 1)) = -1;  // L,i1,dn -> -L,i2,dn
  s(idx(1, 0, 1), idx(0, 0, 1)) = 1;   // R,i1,dn -> L,i1,dn
  s(idx(0, 1, 1), idx(1, 1, 1)) = 1;   // L,i2,dn -> R,i2,dn
  return s;
}

PureState qd_scatter_ideal(const PureState& state, const std::string& photon,
                           const std::string& spin_carrier) {
  require_circular(state, photon, "qd_scatter_ideal");
  require_two_port(state, photon, "qd_scatter_ideal");
  const SubRef targets[] = {pol(photon), spat(photon), spn(spin_carrier)};
  return apply_unitary(state, targets, qd_scatter_matrix());
}

PureState spin_hadamard(const PureState& state, const std::string& spin_carrier) {
  return apply_unitary(state, spn(spin_carrier), hadamard2());
}

PureState plus_spin_state(const std::string& carrier) {
  Vector amp(2);
  amp << kInvSqrt2, kInvSqrt2;
  return {SystemLayout({spin(carrier)}), std::move(amp)};
}

std::vector<Branch> spin_measure(const PureState& state, const std::string& spin_carrier,
                                 SpinBasis basis) {
  SubRef ref = spn(spin_carrier);
  struct Ket {
    std::string name;
    Vector v;
  };
  std::vector<Ket> kets;
  if (basis == SpinBasis::UpDown) {
    Vector up(2), dn(2);
    up << 1, 0;
    dn << 0, 1;
    kets = {{"up", up}, {"dn", dn}};
  } else {
    Vector plus(2), minus(2);
    plus << kInvSqrt2, kInvSqrt2;
    minus << kInvSqrt2, -kInvSqrt2;
    kets = {{"+", plus}, {"-", minus}};
  }
  std::vector<Branch> out;
  for (const auto& k : kets) {
    // contract <k| against the spin register and drop it
    std::vector<SubsystemLabel> labels;
    int si = state.layout.index_of(ref);
    for (int j = 0; j < state.layout.count(); ++j) {
      if (j != si) labels.push_back(state.layout.label(j));
    }
    SystemLayout rest(std::move(labels));
    Vector amp = Vector::Zero(rest.dim());
    for (Eigen::Index g = 0; g < state.amp.size(); ++g) {
      if (state.amp[g] == Complex(0, 0)) continue;
      int digit = state.layout.digit(g, si);
      Eigen::Index rg = 0;
      int rk = 0;
      for (int j = 0; j < state.layout.count(); ++j) {
        if (j == si) continue;
        rg += state.layout.digit(g, j) * rest.stride(rk++);
      }
      amp[rg] += std::conj(k.v[digit]) * state.amp[g];
    }
    double p = amp.squaredNorm();
    if (p < kBranchCutoff) continue;
    amp /= std::sqrt(p);
    out.push_back({{{"spin[" + spin_carrier + "]", k.name}}, p, {rest, std::move(amp)}});
  }
  return out;
}

Matrix qd_pol_pass_matrix() {
  // Chain CPBS split -> U1 -> cavity -> U2 -> CPBS merge -> X through the
  // internal (pol, port, spin) space; R enters on i2, L on i1.
  auto idx = [](int p, int m, int e) { return 4 * p + 2 * m + e; };
  Matrix inject = Matrix::Zero(8, 4);  // (pol x spin) -> (pol, port, spin)
  for (int e = 0; e < 2; ++e) {
    inject(idx(0, 1, e), 0 * 2 + e) = 1;  // R -> port i2
    inject(idx(1, 0, e), 1 * 2 + e) = 1;  // L -> port i1
  }
  Matrix u1 = Matrix::Identity(8, 8);  // plate on the R input path
  for (int e = 0; e < 2; ++e) u1(idx(0, 1, e), idx(0, 1, e)) = -1;
  Matrix u2 = Matrix::Identity(8, 8);  // plate on the i2 exit path
  for (int p = 0; p < 2; ++p) {
    for (int e = 0; e < 2; ++e) u2(idx(p, 1, e), idx(p, 1, e)) = -1;
  }
  Matrix extract = Matrix::Zero(4, 8);  // merge: R leaves on i1, L on i2
  for (int e = 0; e < 2; ++e) {
    extract(0 * 2 + e, idx(0, 0, e)) = 1;
    extract(1 * 2 + e, idx(1, 1, e)) = 1;
  }
  Matrix x = Matrix::Zero(4, 4);  // final half-wave plate, spin untouched
  for (int e = 0; e < 2; ++e) {
    x(0 * 2 + e, 1 * 2 + e) = 1;
    x(1 * 2 + e, 0 * 2 + e) = 1;
  }
  return x * extract * u2 * qd_scatter_matrix() * u1 * inject;
}

PureState qd_pol_pass(const PureState& state, const std::string& photon,
                      const std::string& spin_carrier) {
  require_circular(state, photon, "qd_pol_pass");
  const SubRef targets[] = {pol(photon), spn(spin_carrier)};
  return apply_unitary(state, targets, qd_pol_pass_matrix());
}

Matrix qd_spatial_pass_matrix(Pass pass) {
  // basis (port x spin), port slowest
  Matrix m = Matrix::Zero(4, 4);
  double down_sign = (pass == Pass::First) ? -1.0 : 1.0;
  m(2, 0) = 1;  // a1,up -> a2,up
  m(0, 2) = 1;  // a2,up -> a1,up
  m(1, 1) = down_sign;
  m(3, 3) = down_sign;
  return m;
}

PureState qd_spatial_pass(const PureState& state, const std::string& photon,
                          const std::string& spin_carrier, Pass pass) {
  require_two_port(state, photon, "qd_spatial_pass");
  const SubRef targets[] = {spat(photon), spn(spin_carrier)};
  return apply_unitary(state, targets, qd_spatial_pass_matrix(pass));
}

PureState hybrid_cnot_block(const PureState& state, const std::string& photon,
                            const std::string& spin1, const std::string& spin2,
                            Pass pass) {
  PureState s = qd_pol_pass(state, photon, spin1);
  return qd_spatial_pass(s, photon, spin2, pass);
}

std::vector<PhaseCheckOutcome> ps_qnd(const PureState& state, const std::string& photon_x,
                                      const std::string& photon_y, const std::string& spin1,
                                      const std::string& spin2) {
  PureState s = hybrid_cnot_block(state, photon_x, spin1, spin2, Pass::First);
  s = hybrid_cnot_block(s, photon_y, spin1, spin2, Pass::Second);
  std::vector<PhaseCheckOutcome> out;
  for (const auto& b1 : spin_measure(s, spin1, SpinBasis::PlusMinus)) {
    for (const auto& b2 : spin_measure(b1.post, spin2, SpinBasis::PlusMinus)) {
      PhaseCheckOutcome o;
      o.pol_phase = (b1.outcome[0].value == "+") ? "0" : "pi";
      o.spat_phase = (b2.outcome[0].value == "-") ? "0" : "pi";
      o.probability = b1.probability * b2.probability;
      o.post = b2.post;
      out.push_back(std::move(o));
    }
  }
  return out;
}

std::vector<ParityCheckOutcome> ps_parity_qnd(const PureState& state,
                                              const std::string& photon_x,
                                              const std::string& photon_y,
                                              const std::string& spin1,
                                              const std::string& spin2) {
  auto h_ps = [](PureState s, const std::string& photon) {
    s = apply_unitary(s, pol(photon), hadamard2());
    s = apply_unitary(s, spat(photon), hadamard2());
    return s;
  };
  PureState s = h_ps(h_ps(state, photon_x), photon_y);
  auto checks = ps_qnd(s, photon_x, photon_y, spin1, spin2);
  std::vector<ParityCheckOutcome> out;
  for (auto& c : checks) {
    ParityCheckOutcome o;
    o.pol_parity = (c.pol_phase == "0") ? "even" : "odd";
    o.spat_parity = (c.spat_phase == "0") ? "even" : "odd";
    o.probability = c.probability;
    o.post = h_ps(h_ps(c.post, photon_x), photon_y);
    out.push_back(std::move(o));
  }
  return out;
}

PureState dof_swap(const PureState& state, const std::string& photon) {
  require_circular(state, photon, "dof_swap");
  require_two_port(state, photon, "dof_swap");
  Matrix m = Matrix::Zero(4, 4);  // (pol x port) -> (port x pol)
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = 1;
  const SubRef targets[] = {pol(photon), spat(photon)};
  return apply_unitary(state, targets, m);
}

std::vector<QsjmBranch> qsjm(const PureState& state, const std::string& photon_a,
                             const std::string& photon_b, const std::string& spin_carrier) {
  require_circular(state, photon_a, "qsjm");
  require_circular(state, photon_b, "qsjm");
  PureState s = qd_pol_pass(state, photon_a, spin_carrier);

  // photon A is fully detected, polarization in {R, L}
  std::vector<optics::DetectBasis> bases = {optics::DetectBasis::PolLinear};
  if (s.layout.contains(spat(photon_a))) bases.push_back(optics::DetectBasis::SpatialPath);
  if (s.layout.contains(tbin(photon_a))) bases.push_back(optics::DetectBasis::TimeBin);

  std::vector<QsjmBranch> out;
  for (const auto& da : optics::detect(s, photon_a, bases)) {
    bool a_was_l = (da.outcome[0].value == "L");
    PureState t = spin_hadamard(da.post, spin_carrier);
    t = qd_pol_pass(t, photon_b, spin_carrier);
    t = apply_unitary(t, pol(photon_b), hadamard2());
    t = spin_hadamard(t, spin_carrier);
    t = qd_pol_pass(t, photon_b, spin_carrier);
    t = spin_hadamard(t, spin_carrier);
    for (const auto& ds : spin_measure(t, spin_carrier, SpinBasis::UpDown)) {
      QsjmBranch br;
      br.outcome = da.outcome;
      br.outcome.push_back(ds.outcome[0]);
      br.probability = da.probability * ds.probability;
      PureState f = ds.post;
      if (a_was_l) {
        f = apply_unitary(f, pol(photon_b), optics::element_matrix(optics::Element::SigmaXPol));
        br.corrections.push_back("sigma_x_pol[" + photon_b + "]");
      }
      if (ds.outcome[0].value == "dn") {
        f = apply_unitary(f, pol(photon_b), optics::element_matrix(optics::Element::SigmaZPol));
        br.corrections.push_back("sigma_z_pol[" + photon_b + "]");
      }
      br.post = std::move(f);
      out.push_back(std::move(br));
    }
  }
  return out;
}

}  // namespace hypersim::qnd
