#pragma once

#include "hypersim/core.hpp"

namespace hypersim::protocols {

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

std::string to_string(BellKind k);          // "phi+", "phi-", "psi+", "psi-"
BellKind parse_bell(const std::string& s);  // accepts the four names above

/// One of the 16 hyperentangled Bell states: a Bell state per DOF.
struct HyperBellLabel {
  BellKind pol = BellKind::PhiPlus;
  BellKind spat = BellKind::PhiPlus;
};

/// Two-qubit Bell vector, basis (q1 x q2), q1 slowest.
Vector bell_vector(BellKind k);

/// Known real amplitudes of a partially hyperentangled pair,
/// alpha^2+beta^2 = gamma^2+delta^2 = 1. For polarization-time-bin pairs
/// the second pair is (delta, eta).
struct PartialHyperParams {
  double alpha = 1.0 / std::sqrt(2.0);
  double beta = 1.0 / std::sqrt(2.0);
  double gamma = 1.0 / std::sqrt(2.0);
  double delta = 1.0 / std::sqrt(2.0);
};

/// Validates both pairs to unit norm (1e-9), renormalizes exactly.
PartialHyperParams validate_params(PartialHyperParams p);

/// Layout [pol x, pol y, dof2 x, dof2 y] used by all two-photon factories.
SystemLayout pair_layout(const std::string& x, const std::string& y,
                         BasisTag pol_tag = BasisTag::Linear,
                         DofKind second = DofKind::Spatial);

/// (alpha|00> + beta|11>)_P (gamma|00> + delta|11>)_S on pair_layout(x,y).
PureState make_partial(const PartialHyperParams& p, const std::string& x,
                       const std::string& y, BasisTag pol_tag = BasisTag::Linear,
                       DofKind second = DofKind::Spatial);

/// Maximally hyperentangled Bell state of the given label.
PureState make_hyper_bell(const HyperBellLabel& label, const std::string& x,
                          const std::string& y, BasisTag pol_tag = BasisTag::Linear);

enum class MixedErrorModel {
  BitflipPolPhaseflipSpat,  // pol error psi+, spatial error phi-
  General,                  // residual weight split over the three other Bell states
};

/// Mixed hyperentangled pair: F1/F2 are the phi+ weights per DOF.
Ensemble make_mixed(double f1, double f2, const std::string& x, const std::string& y,
                    MixedErrorModel model = MixedErrorModel::BitflipPolPhaseflipSpat,
                    BasisTag pol_tag = BasisTag::Circular);

}  // namespace hypersim::protocols
