#pragma once

#include "hypersim/core.hpp"

namespace hypersim::qnd {

/// Nondestructive polarization parity check on two photons via a coherent
/// probe. "shifted" is the even-parity class {HH, VV} (the +/- theta probe
/// phases are one merged class), "unshifted" the odd class {HV, VH}.
/// Amplitudes within each parity subspace are untouched.
std::vector<Branch> xkerr_parity_pol(const PureState& state, const std::string& photon_x,
                                     const std::string& photon_y);

/// Same check on the two-port spatial registers: "shifted" keeps
/// {a1b1, a2b2}, "unshifted" {a1b2, a2b1}.
std::vector<Branch> xkerr_parity_spatial(const PureState& state, const std::string& photon_x,
                                         const std::string& photon_y);

/// Second analysis stage: resolves the joint spatial basis state. The four
/// probe phase classes theta1+theta3 / theta2+theta4 / theta1+theta4 /
/// theta2+theta3 correspond to c1d1 / c2d2 / c1d2 / c2d1.
std::vector<Branch> xkerr_spatial_analyzer(const PureState& state,
                                           const std::string& photon_x,
                                           const std::string& photon_y);

/// Joint-mode label ("11", "22", "12", "21") for a phase-class token value.
std::string analyzer_modes(const std::string& phase_class);

}  // namespace hypersim::qnd
