#include "hypersim/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace hypersim::optics {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Matrix hadamard2() {
  Matrix m(2, 2);
  m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return m;
}

Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// -i sigma_y = |0><1| - |1><0|
Matrix minus_i_sigma_y() {
  Matrix m(2, 2);
  m << 0, 1, -1, 0;
  return m;
}

}  // namespace

Matrix element_matrix(Element e, double theta) {
  switch (e) {
    case Element::HadamardPol:
    case Element::HadamardSpatial:
      return hadamard2();
    case Element::SigmaXPol:
    case Element::SigmaXSpatial:
    case Element::SigmaXTimeBin:
      return sigma_x();
    case Element::SigmaZPol:
    case Element::SigmaZSpatial:
    case Element::SigmaZTimeBin:
      return sigma_z();
    case Element::MinusISigmaYPol:
    case Element::MinusISigmaYSpatial:
      return minus_i_sigma_y();
    case Element::RTheta: {
      Matrix m(2, 2);
      m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
      return m;
    }
    case Element::UPhase:
      return -Matrix::Identity(2, 2);
    case Element::SigmaZCircular: {
      Matrix m(2, 2);
      m << -1, 0, 0, 1;
      return m;
    }
  }
  throw std::invalid_argument("element_matrix: unknown element");
}

DofKind element_dof(Element e) {
  switch (e) {
    case Element::HadamardPol:
    case Element::SigmaXPol:
    case Element::SigmaZPol:
    case Element::MinusISigmaYPol:
    case Element::RTheta:
    case Element::UPhase:
    case Element::SigmaZCircular:
      return DofKind::Polarization;
    case Element::HadamardSpatial:
    case Element::SigmaXSpatial:
    case Element::SigmaZSpatial:
    case Element::MinusISigmaYSpatial:
      return DofKind::Spatial;
    case Element::SigmaXTimeBin:
    case Element::SigmaZTimeBin:
      return DofKind::TimeBin;
  }
  throw std::invalid_argument("element_dof: unknown element");
}

PureState hadamard_pol(const PureState& state, const std::string& photon) {
  return apply_unitary(state, pol(photon), hadamard2());
}

PureState hadamard_spatial(const PureState& state, const std::string& photon) {
  int i = state.layout.index_of(spat(photon));
  if (state.layout.label(i).dim != 2) {
    throw std::invalid_argument("hadamard_spatial: BS is defined only on two ports, " +
                                photon + " has dimension " +
                                std::to_string(state.layout.label(i).dim));
  }
  return apply_unitary(state, spat(photon), hadamard2());
}

PureState apply_local(const PureState& state, const std::string& photon, Element e,
                      double theta) {
  SubRef ref{photon, element_dof(e)};
  if (!state.layout.contains(ref)) {
    throw std::invalid_argument("apply_local: " + photon + " has no " +
                                to_string(ref.kind) + " subsystem");
  }
  int i = state.layout.index_of(ref);
  if (state.layout.label(i).dim != 2) {
    throw std::invalid_argument("apply_local: element needs a two-level subsystem");
  }
  return apply_unitary(state, ref, element_matrix(e, theta));
}

PureState ubs_split(const PureState& state, const std::string& photon, double R) {
  if (!(R > 0.0 && R < 1.0)) {
    throw std::invalid_argument("ubs_split: reflection coefficient must be in (0,1)");
  }
  int i = state.layout.index_of(spat(photon));
  if (state.layout.label(i).dim != 2) {
    throw std::invalid_argument("ubs_split: spatial register of " + photon +
                                " must have dimension 2");
  }
  Matrix iso(3, 2);
  iso << 1, 0, 0, R, 0, std::sqrt(1.0 - R * R);
  return promote_subsystem(state, spat(photon), spatial(photon, 3), iso);
}

namespace {

std::vector<Branch> parity_branches(const PureState& state, const SubRef& x,
                                    const SubRef& y, const std::string& key,
                                    const std::string& keep_even_name,
                                    const std::string& keep_odd_name) {
  Matrix even = Matrix::Zero(4, 4), odd = Matrix::Zero(4, 4);
  even(0, 0) = even(3, 3) = 1;  // 00, 11
  odd(1, 1) = odd(2, 2) = 1;    // 01, 10
  const SubRef targets[] = {x, y};
  return measure_projective(state, targets,
                            {{keep_even_name, even}, {keep_odd_name, odd}}, key);
}

}  // namespace

std::vector<Branch> pbs_parity_check(const PureState& state, const std::string& photon_x,
                                     const std::string& photon_y) {
  return parity_branches(state, pol(photon_x), pol(photon_y),
                         "pbs[" + photon_x + photon_y + "]", "even", "odd");
}

std::vector<Branch> bs_hom_parity(const PureState& state, const std::string& photon_x,
                                  const std::string& photon_y) {
  int ix = state.layout.index_of(spat(photon_x));
  int iy = state.layout.index_of(spat(photon_y));
  if (state.layout.label(ix).dim != 2 || state.layout.label(iy).dim != 2) {
    throw std::invalid_argument("bs_hom_parity: both spatial registers must be two-port");
  }
  return parity_branches(state, spat(photon_x), spat(photon_y),
                         "hom[" + photon_x + photon_y + "]", "even", "odd");
}

PureState pockels(const PureState& state, const std::string& photon, int bin) {
  if (bin != 0 && bin != 1) throw std::invalid_argument("pockels: bin must be 0 (S) or 1 (L)");
  if (!state.layout.contains(tbin(photon))) {
    throw std::invalid_argument("pockels: " + photon + " has no time-bin subsystem");
  }
  // controlled sigma_x on polarization, time-bin as control
  Matrix u = Matrix::Identity(4, 4);
  int base = 2 * bin;
  u(base, base) = 0;
  u(base + 1, base + 1) = 0;
  u(base, base + 1) = 1;
  u(base + 1, base) = 1;
  const SubRef targets[] = {tbin(photon), pol(photon)};
  return apply_unitary(state, targets, u);
}

PureState unbalanced_interferometer(const PureState& state, const std::string& photon) {
  if (state.layout.contains(arr(photon))) {
    throw std::invalid_argument("unbalanced_interferometer: " + photon +
                                " is already expanded to an arrival register");
  }
  if (!state.layout.contains(tbin(photon))) {
    throw std::invalid_argument("unbalanced_interferometer: " + photon +
                                " has no time-bin subsystem");
  }
  Matrix iso = Matrix::Zero(4, 2);
  iso(0, 0) = iso(1, 0) = kInvSqrt2;  // S -> (SS + SL)/sqrt2
  iso(2, 1) = iso(3, 1) = kInvSqrt2;  // L -> (LS + LL)/sqrt2
  return promote_subsystem(state, tbin(photon), arrival(photon), iso);
}

namespace {

struct BasisSpec {
  SubRef ref;
  std::vector<std::pair<std::string, Vector>> states;  // token value, ket
};

Vector ket2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}

BasisSpec resolve_basis(const PureState& state, const std::string& photon, DetectBasis b) {
  switch (b) {
    case DetectBasis::PolLinear: {
      SubRef r = pol(photon);
      const auto& lab = state.layout.label(state.layout.index_of(r));
      return {r,
              {{basis_name(lab.tag, 0), ket2(1, 0)}, {basis_name(lab.tag, 1), ket2(0, 1)}}};
    }
    case DetectBasis::PolDiagonal: {
      // plate + PBS: detector H fires on (|0>+|1>)/sqrt2, V on (|0>-|1>)/sqrt2
      return {pol(photon),
              {{"H", ket2(kInvSqrt2, kInvSqrt2)}, {"V", ket2(kInvSqrt2, -kInvSqrt2)}}};
    }
    case DetectBasis::SpatialPath: {
      SubRef r = spat(photon);
      int d = state.layout.label(state.layout.index_of(r)).dim;
      BasisSpec spec{r, {}};
      for (int k = 0; k < d; ++k) {
        Vector v = Vector::Zero(d);
        v[k] = 1;
        spec.states.push_back({basis_name(BasisTag::Path, k), v});
      }
      return spec;
    }
    case DetectBasis::TimeBin: {
      return {tbin(photon), {{"S", ket2(1, 0)}, {"L", ket2(0, 1)}}};
    }
    case DetectBasis::ArrivalClass: {
      Vector early = Vector::Zero(4), midp = Vector::Zero(4), midm = Vector::Zero(4),
             late = Vector::Zero(4);
      early[0] = 1;
      midp[1] = midp[2] = kInvSqrt2;
      midm[1] = kInvSqrt2;
      midm[2] = -kInvSqrt2;
      late[3] = 1;
      return {arr(photon),
              {{"early", early}, {"middle+", midp}, {"middle-", midm}, {"late", late}}};
    }
  }
  throw std::invalid_argument("detect: unknown basis");
}

// Contracts one subsystem against <v| and drops it from the layout.
// Returns the unnormalized remainder.
std::pair<SystemLayout, Vector> contract(const SystemLayout& layout, const Vector& amp,
                                         const SubRef& ref, const Vector& v) {
  int i = layout.index_of(ref);
  std::vector<SubsystemLabel> labels;
  for (int k = 0; k < layout.count(); ++k) {
    if (k != i) labels.push_back(layout.label(k));
  }
  SystemLayout rest(std::move(labels));
  Vector out = Vector::Zero(rest.dim());
  for (Eigen::Index g = 0; g < amp.size(); ++g) {
    if (amp[g] == Complex(0, 0)) continue;
    int digit = layout.digit(g, i);
    Eigen::Index rg = 0;
    int rk = 0;
    for (int k = 0; k < layout.count(); ++k) {
      if (k == i) continue;
      rg += layout.digit(g, k) * rest.stride(rk++);
    }
    out[rg] += std::conj(v[digit]) * amp[g];
  }
  return {std::move(rest), std::move(out)};
}

}  // namespace

std::vector<Branch> detect(const PureState& state, const std::string& photon,
                           const std::vector<DetectBasis>& bases) {
  if (bases.empty()) throw std::invalid_argument("detect: no basis given");
  std::vector<BasisSpec> specs;
  for (auto b : bases) specs.push_back(resolve_basis(state, photon, b));

  std::vector<Branch> out;
  std::vector<int> choice(specs.size(), 0);
  while (true) {
    SystemLayout layout = state.layout;
    Vector amp = state.amp;
    std::vector<OutcomeToken> tokens;
    for (size_t k = 0; k < specs.size(); ++k) {
      const auto& [value, ket] = specs[k].states[choice[k]];
      const auto& lab = layout.label(layout.index_of(specs[k].ref));
      tokens.push_back({to_string(lab.kind) + "[" + photon + "]", value});
      auto [rest, ramp] = contract(layout, amp, specs[k].ref, ket);
      layout = std::move(rest);
      amp = std::move(ramp);
    }
    double p = amp.squaredNorm();
    if (p >= kBranchCutoff) {
      amp /= std::sqrt(p);
      out.push_back({std::move(tokens), p, {std::move(layout), std::move(amp)}});
    }
    // next outcome combination
    size_t k = specs.size();
    while (k > 0) {
      --k;
      if (++choice[k] < static_cast<int>(specs[k].states.size())) break;
      choice[k] = 0;
      if (k == 0) return out;
    }
  }
}

std::string arrival_class(const std::string& token_value) {
  if (token_value == "middle+" || token_value == "middle-") return "middle";
  return token_value;
}

}  // namespace hypersim::optics
