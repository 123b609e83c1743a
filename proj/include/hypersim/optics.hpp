#pragma once

#include "hypersim/core.hpp"

namespace hypersim::optics {

/// Fixed linear-optical elements. R_theta takes the rotation angle,
/// UBS the reflection coefficient R.
enum class Element {
  HadamardPol,
  HadamardSpatial,
  SigmaXPol,
  SigmaZPol,
  MinusISigmaYPol,
  SigmaXSpatial,
  SigmaZSpatial,
  MinusISigmaYSpatial,
  SigmaXTimeBin,
  SigmaZTimeBin,
  RTheta,
  UPhase,     // -I on polarization (wave plate U)
  SigmaZCircular,  // -|R><R| + |L><L| (wave plate Z)
};

/// The 2x2 unitary of an element; theta is used by RTheta only.
Matrix element_matrix(Element e, double theta = 0.0);

/// Degree of freedom an element acts on.
DofKind element_dof(Element e);

PureState hadamard_pol(const PureState& state, const std::string& photon);
PureState hadamard_spatial(const PureState& state, const std::string& photon);

PureState apply_local(const PureState& state, const std::string& photon, Element e,
                      double theta = 0.0);

/// Unbalanced beam splitter on path a2: promotes the spatial register to
/// dimension 3 with |a2> -> R|a2> + sqrt(1-R^2)|a3>, |a1> untouched.
PureState ubs_split(const PureState& state, const std::string& photon, double R);

/// Polarization parity filter on a PBS: "even" keeps {HH,VV}, "odd" {HV,VH}.
std::vector<Branch> pbs_parity_check(const PureState& state, const std::string& photon_x,
                                     const std::string& photon_y);

/// Spatial parity filter via two-photon interference: "odd" keeps
/// {b1d2, b2d1}, "even" is the bunched case.
std::vector<Branch> bs_hom_parity(const PureState& state, const std::string& photon_x,
                                  const std::string& photon_y);

/// Pockels cell: polarization bit-flip on the amplitude slice where the
/// time-bin equals `bin` (0 = S, 1 = L).
PureState pockels(const PureState& state, const std::string& photon, int bin);

/// Unbalanced interferometer: replaces the time-bin register by a 4-level
/// arrival register, |S> -> (|SS>+|SL>)/sqrt2, |L> -> (|LS>+|LL>)/sqrt2.
PureState unbalanced_interferometer(const PureState& state, const std::string& photon);

/// What a detector bank resolves.
enum class DetectBasis {
  PolLinear,       // {H, V}
  PolDiagonal,     // {(H+V)/sqrt2 -> "H", (H-V)/sqrt2 -> "V"} (plate before the PBS)
  SpatialPath,     // path index
  TimeBin,         // {S, L}
  ArrivalClass,    // {SS -> early, (SL+LS)/sqrt2 -> middle+, (SL-LS)/sqrt2 -> middle-, LL -> late}
};

/// Destructive detection of one photon: measures each listed subsystem in
/// its basis, removes the measured subsystems from the post-state layout.
/// Tokens are keyed "dof[photon]".
std::vector<Branch> detect(const PureState& state, const std::string& photon,
                           const std::vector<DetectBasis>& bases);

/// Arrival class ("early"/"middle"/"late") of a detect() arrival token value.
std::string arrival_class(const std::string& token_value);

}  // namespace hypersim::optics
