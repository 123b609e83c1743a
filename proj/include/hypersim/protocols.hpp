#pragma once

#include "hypersim/report.hpp"
#include "hypersim/states.hpp"

namespace hypersim::protocols {

// ---------------------------------------------------------------------------
// Hyperentangled Bell-state analysis and the protocols built on it
// ---------------------------------------------------------------------------

/// One resolved analysis outcome: the identified label plus the raw
/// measurement record. The analyzed photons are consumed.
struct HbsaBranch {
  HyperBellLabel label;
  std::vector<OutcomeToken> outcome;
  double probability = 0.0;
  PureState post;
};

/// Runs the two-stage analysis (spatial stage: parity check, port mixing,
/// phase-class analyzer; polarization stage: parity check, plates,
/// detectors) on photons x and y of `state`.
std::vector<HbsaBranch> hbsa_branches(const PureState& state, const std::string& x,
                                      const std::string& y);

/// Full analysis report for a two-photon input state.
ProtocolReport hbsa(const PureState& state, const std::string& x, const std::string& y);
/// Convenience: analysis of a freshly prepared hyper-Bell state.
ProtocolReport hbsa(const HyperBellLabel& label);

struct TeleportParams {
  double alpha = 1, beta = 0, gamma = 1, delta = 0;  // photon A, both DOFs
  PartialHyperParams channel;                        // defaults to maximal
};

/// Teleports photon A's two-DOF state onto photon C through the BC channel.
ProtocolReport teleport(const TeleportParams& p);

/// Entanglement swapping: analysis of BC projects AD onto a hyper-Bell
/// state which feed-forward returns to phi+ in both DOFs.
ProtocolReport swap_pairs();

// ---------------------------------------------------------------------------
// Concentration protocols
// ---------------------------------------------------------------------------

/// Parameter-splitting concentration with known amplitudes,
/// |alpha| > |beta| and |gamma| < |delta| canonical. Other orderings are
/// rejected unless `permute` authorizes the documented relabel.
ProtocolReport ecp_param_split(const PartialHyperParams& p, bool permute = false);

/// Two-copy concentration with unknown amplitudes, linear elements only.
ProtocolReport ecp_schmidt_linear(const PartialHyperParams& p);

/// Two-copy concentration with parity-check QNDs, iterated `rounds` times.
/// Metrics carry per-round success probabilities p1..pn and the round-1/2
/// closed forms.
ProtocolReport ecp_qnd_iterative(const PartialHyperParams& p, int rounds);

/// Per-round success probabilities from the coefficient recursion alone
/// (no enumeration); used by the iteration curve.
std::vector<double> ecp_qnd_round_probabilities(const PartialHyperParams& p, int rounds);

struct TimebinParams {
  double alpha = 1 / std::sqrt(2.0), beta = 1 / std::sqrt(2.0);
  double delta = 1 / std::sqrt(2.0), eta = 1 / std::sqrt(2.0);
};

/// Polarization-time-bin concentration; success leaves psi++ on AB.
ProtocolReport ecp_timebin(const TimebinParams& p);

// ---------------------------------------------------------------------------
// Purification
// ---------------------------------------------------------------------------

/// Output of one first-step case: the surviving AB ensemble with its
/// aggregate probability and per-DOF fidelities.
struct EppCaseOutput {
  int case_id = 0;  // 1..4 (case 2 keeps no ensemble)
  double probability = 0.0;
  std::optional<Ensemble> ensemble;  // layout [pol A, pol B, spat A, spat B]
  double pol_fidelity = 0.0;
  double spat_fidelity = 0.0;
};

struct EppStep1Result {
  ProtocolReport report;
  EppCaseOutput cases[4];  // index 0..3 <-> case 1..4
};

/// First purification step on rho_AB (x) rho_CD built from (f1, f2).
EppStep1Result hyper_epp_step1(double f1, double f2);
/// Same, for caller-supplied pair ensembles on pair_layout(x,y,Circular).
EppStep1Result hyper_epp_step1(const Ensemble& rho_ab, const Ensemble& rho_cd);

/// Second step: state joining combines the good polarization of the
/// case-3 pair with the good spatial DOF of the case-4 pair (either
/// argument order). Both inputs from the same case are rejected.
ProtocolReport hyper_epp_step2(const EppCaseOutput& first, const EppCaseOutput& second);

/// Closed-form iteration: fidelity trajectory and first-round efficiencies.
ProtocolReport hyper_epp_full(double f1, double f2, int rounds);

// ---------------------------------------------------------------------------
// Hyperparallel CNOT
// ---------------------------------------------------------------------------

struct HyperCnotInput {
  // photon A (control) and B (target) product amplitudes
  Complex pol_a[2] = {1, 0};
  Complex spat_a[2] = {1, 0};
  Complex pol_b[2] = {1, 0};
  Complex spat_b[2] = {1, 0};
};

/// Runs the gate on a product input; every spin branch ends, after the two
/// sign corrections, in the polarization-CNOT x spatial-CNOT image.
ProtocolReport hyper_cnot(const HyperCnotInput& input);

/// The gate run on an arbitrary photonic state (pair_layout(a, b, Circular)
/// extended with spatial registers). Returns per-spin-branch outputs.
ProtocolReport hyper_cnot_state(const PureState& photons, const std::string& a,
                                const std::string& b);

/// Ideal CNOT (x) CNOT image of a photonic two-photon state; oracle for the
/// gate tests.
PureState hyper_cnot_ideal(const PureState& photons, const std::string& a,
                           const std::string& b);

}  // namespace hypersim::protocols
