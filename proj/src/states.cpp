#include "hypersim/states.hpp"

#include <cmath>
#include <stdexcept>

#include "hypersim/report.hpp"

namespace hypersim::protocols {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

std::string to_string(BellKind k) {
  switch (k) {
    case BellKind::PhiPlus: return "phi+";
    case BellKind::PhiMinus: return "phi-";
    case BellKind::PsiPlus: return "psi+";
    case BellKind::PsiMinus: return "psi-";
  }
  return "?";
}

BellKind parse_bell(const std::string& s) {
  if (s == "phi+") return BellKind::PhiPlus;
  if (s == "phi-") return BellKind::PhiMinus;
  if (s == "psi+") return BellKind::PsiPlus;
  if (s == "psi-") return BellKind::PsiMinus;
  throw std::invalid_argument("parse_bell: unknown Bell label '" + s + "'");
}

Vector bell_vector(BellKind k) {
  Vector v = Vector::Zero(4);
  switch (k) {
    case BellKind::PhiPlus:
      v[0] = v[3] = kInvSqrt2;
      break;
    case BellKind::PhiMinus:
      v[0] = kInvSqrt2;
      v[3] = -kInvSqrt2;
      break;
    case BellKind::PsiPlus:
      v[1] = v[2] = kInvSqrt2;
      break;
    case BellKind::PsiMinus:
      v[1] = kInvSqrt2;
      v[2] = -kInvSqrt2;
      break;
  }
  return v;
}

PartialHyperParams validate_params(PartialHyperParams p) {
  double n1 = p.alpha * p.alpha + p.beta * p.beta;
  double n2 = p.gamma * p.gamma + p.delta * p.delta;
  if (std::abs(n1 - 1.0) > 1e-9 || std::abs(n2 - 1.0) > 1e-9) {
    throw std::invalid_argument("params: amplitude pairs must satisfy a^2+b^2=1");
  }
  p.alpha /= std::sqrt(n1);
  p.beta /= std::sqrt(n1);
  p.gamma /= std::sqrt(n2);
  p.delta /= std::sqrt(n2);
  return p;
}

SystemLayout pair_layout(const std::string& x, const std::string& y, BasisTag pol_tag,
                         DofKind second) {
  auto pol_label = (pol_tag == BasisTag::Circular) ? pol_circular : pol_linear;
  SubsystemLabel sx, sy;
  if (second == DofKind::Spatial) {
    sx = spatial(x);
    sy = spatial(y);
  } else if (second == DofKind::TimeBin) {
    sx = timebin(x);
    sy = timebin(y);
  } else {
    throw std::invalid_argument("pair_layout: second DOF must be spatial or time-bin");
  }
  return register_layout({pol_label(x), pol_label(y), sx, sy});
}

namespace {

PureState from_dof_vectors(const SystemLayout& layout, const Vector& pol_vec,
                           const Vector& dof2_vec) {
  Vector amp = Vector::Zero(16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) amp[i * 4 + j] = pol_vec[i] * dof2_vec[j];
  }
  return make_state(layout, std::move(amp));
}

}  // namespace

PureState make_partial(const PartialHyperParams& raw, const std::string& x,
                       const std::string& y, BasisTag pol_tag, DofKind second) {
  PartialHyperParams p = validate_params(raw);
  Vector pv = Vector::Zero(4), sv = Vector::Zero(4);
  pv[0] = p.alpha;
  pv[3] = p.beta;
  sv[0] = p.gamma;
  sv[3] = p.delta;
  return from_dof_vectors(pair_layout(x, y, pol_tag, second), pv, sv);
}

PureState make_hyper_bell(const HyperBellLabel& label, const std::string& x,
                          const std::string& y, BasisTag pol_tag) {
  return from_dof_vectors(pair_layout(x, y, pol_tag), bell_vector(label.pol),
                          bell_vector(label.spat));
}

Ensemble make_mixed(double f1, double f2, const std::string& x, const std::string& y,
                    MixedErrorModel model, BasisTag pol_tag) {
  if (f1 < 0 || f1 > 1 || f2 < 0 || f2 > 1) {
    throw std::invalid_argument("make_mixed: fidelities must lie in [0,1]");
  }
  SystemLayout layout = pair_layout(x, y, pol_tag);
  std::vector<std::pair<double, Vector>> pol_parts, spat_parts;
  if (model == MixedErrorModel::BitflipPolPhaseflipSpat) {
    pol_parts = {{f1, bell_vector(BellKind::PhiPlus)},
                 {1 - f1, bell_vector(BellKind::PsiPlus)}};
    spat_parts = {{f2, bell_vector(BellKind::PhiPlus)},
                  {1 - f2, bell_vector(BellKind::PhiMinus)}};
  } else {
    pol_parts = {{f1, bell_vector(BellKind::PhiPlus)},
                 {(1 - f1) / 3, bell_vector(BellKind::PhiMinus)},
                 {(1 - f1) / 3, bell_vector(BellKind::PsiPlus)},
                 {(1 - f1) / 3, bell_vector(BellKind::PsiMinus)}};
    spat_parts = {{f2, bell_vector(BellKind::PhiPlus)},
                  {(1 - f2) / 3, bell_vector(BellKind::PhiMinus)},
                  {(1 - f2) / 3, bell_vector(BellKind::PsiPlus)},
                  {(1 - f2) / 3, bell_vector(BellKind::PsiMinus)}};
  }
  std::vector<std::pair<double, PureState>> members;
  for (const auto& [wp, pv] : pol_parts) {
    for (const auto& [ws, sv] : spat_parts) {
      if (wp * ws <= 0) continue;
      members.push_back({wp * ws, from_dof_vectors(layout, pv, sv)});
    }
  }
  return mix(std::move(members));
}

double ProtocolReport::branch_probability_sum() const {
  double s = 0;
  for (const auto& b : branches) s += b.probability;
  return s;
}

double ProtocolReport::min_branch_fidelity() const {
  double f = std::numeric_limits<double>::quiet_NaN();
  for (const auto& b : branches) {
    if (std::isnan(b.fidelity)) continue;
    if (std::isnan(f) || b.fidelity < f) f = b.fidelity;
  }
  return f;
}

void ProtocolReport::finalize() {
  success_probability = 0;
  for (const auto& b : branches) {
    if (b.success) success_probability += b.probability;
  }
}

}  // namespace hypersim::protocols
