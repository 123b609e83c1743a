#pragma once

#include "hypersim/core.hpp"

namespace hypersim::qnd {

/// Rates and frequencies of the double-sided cavity interface, all in the
/// same rate units.
struct CavityParams {
  double g = 0.0;        // dipole-cavity coupling strength
  double kappa = 1.0;    // cavity decay to the output modes
  double kappa_s = 0.0;  // side-leakage rate
  double gamma = 0.0;    // exciton decay rate
  double omega = 0.0;    // input photon frequency
  double omega_c = 0.0;  // cavity mode frequency
  double omega_x = 0.0;  // exciton transition frequency
};

/// Reflection and transmission coefficients of the interface in the weak
/// excitation limit; r = 1 + t identically. Rejects a vanishing response
/// denominator (kappa = g = gamma = 0 at resonance).
std::pair<Complex, Complex> qd_coefficients(const CavityParams& p);

/// Ideal strong-coupling scattering: the eight joint rules on
/// (circular polarization, two-port spatial register, spin). Rejects a
/// linear-basis polarization label.
PureState qd_scatter_ideal(const PureState& state, const std::string& photon,
                           const std::string& spin_carrier);
/// The 8x8 unitary of the rules, basis (pol x port x spin), pol slowest.
Matrix qd_scatter_matrix();

PureState spin_hadamard(const PureState& state, const std::string& spin_carrier);

/// Fresh spin register prepared in |+> = (|up>+|dn>)/sqrt2, ready to be
/// tensored into a system before a QND pass.
PureState plus_spin_state(const std::string& carrier);

enum class SpinBasis { UpDown, PlusMinus };

/// Destructive spin readout; the spin register leaves the layout.
std::vector<Branch> spin_measure(const PureState& state, const std::string& spin_carrier,
                                 SpinBasis basis);

/// Which traversal of the two-cavity circuit a photon makes. The relative
/// sign the spin-down branch picks up in the spatial half differs between
/// the first and the second photon that runs through the device.
enum class Pass { First, Second };

/// Polarization half of the circuit (CPBS, U, cavity, U, CPBS, X chain):
/// flips the photon polarization iff the spin is down. Composed from the
/// scattering rules; identical for both passes.
PureState qd_pol_pass(const PureState& state, const std::string& photon,
                      const std::string& spin_carrier);
/// The composed 4x4 matrix on (pol x spin), built by chaining the
/// scattering rules through the internal ports.
Matrix qd_pol_pass_matrix();

/// Spatial half: swaps the two ports iff the spin is up; the spin-down
/// branch carries -1 on the first pass and +1 on the second.
PureState qd_spatial_pass(const PureState& state, const std::string& photon,
                          const std::string& spin_carrier, Pass pass);
Matrix qd_spatial_pass_matrix(Pass pass);

/// One photon traversal of the full two-cavity circuit: polarization half
/// against spin1, spatial half against spin2.
PureState hybrid_cnot_block(const PureState& state, const std::string& photon,
                            const std::string& spin1, const std::string& spin2,
                            Pass pass = Pass::First);

struct PhaseCheckOutcome {
  std::string pol_phase;   // "0" or "pi"
  std::string spat_phase;  // "0" or "pi"
  double probability = 0.0;
  PureState post;          // photons untouched, spins consumed
};

/// Polarization-spatial phase-check QND on a photon pair. Spins must be
/// prepared in |+>|+>; they are measured in the +/- basis and consumed.
/// Readout: e1 = + <=> polarization relative phase 0; e2 = - <=> spatial
/// relative phase 0.
std::vector<PhaseCheckOutcome> ps_qnd(const PureState& state, const std::string& photon_x,
                                      const std::string& photon_y, const std::string& spin1,
                                      const std::string& spin2);

struct ParityCheckOutcome {
  std::string pol_parity;   // "even" or "odd"
  std::string spat_parity;  // "even" or "odd"
  double probability = 0.0;
  PureState post;
};

/// Phase check sandwiched between Hadamards on both DOFs of both photons:
/// a nondestructive parity check in both DOFs.
std::vector<ParityCheckOutcome> ps_parity_qnd(const PureState& state,
                                              const std::string& photon_x,
                                              const std::string& photon_y,
                                              const std::string& spin1,
                                              const std::string& spin2);

/// Swap gate between the polarization and the two-port spatial register of
/// one photon. The cavity-assisted circuit realizing it is specified only
/// through its input/output contract, which this map implements exactly:
/// (a1|R>+a2|L>)(g1|1>+g2|2>)  ->  (g1|R>+g2|L>)(a1|1>+a2|2>), extended
/// linearly (entanglement with other carriers moves between the DOFs).
PureState dof_swap(const PureState& state, const std::string& photon);

struct QsjmBranch {
  std::vector<OutcomeToken> outcome;
  double probability = 0.0;
  std::vector<std::string> corrections;
  PureState post;  // photon A and the spin are consumed
};

/// Quantum-state joining: transfers photon A's polarization onto photon B
/// through a cavity spin prepared in |+>. Photon A is detected (all of its
/// registers), the spin is read out, and the two conditional corrections
/// make the transfer deterministic on every branch.
std::vector<QsjmBranch> qsjm(const PureState& state, const std::string& photon_a,
                             const std::string& photon_b, const std::string& spin_carrier);

}  // namespace hypersim::qnd
