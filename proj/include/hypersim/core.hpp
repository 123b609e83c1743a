#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hypersim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Absolute tolerances used across the library.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kProbTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kBranchCutoff = 1e-12;

enum class DofKind { Polarization, Spatial, TimeBin, Spin, Arrival };

enum class BasisTag { Linear, Circular, Path, Bin, SpinUpDown, ArrivalBins };

std::string to_string(DofKind kind);
std::string to_string(BasisTag tag);

/// Name of basis state `index` in a given single-subsystem basis
/// (Linear: H,V; Circular: R,L; Path: 1,2,3; Bin: S,L; spin: up,dn;
/// arrival: SS,SL,LS,LL).
std::string basis_name(BasisTag tag, int index);

/// One degree of freedom of one carrier. (carrier, kind) identifies the
/// subsystem inside a layout.
struct SubsystemLabel {
  std::string carrier;
  DofKind kind = DofKind::Polarization;
  int dim = 2;
  BasisTag tag = BasisTag::Linear;
};

bool operator==(const SubsystemLabel& a, const SubsystemLabel& b);

// Label factories for the carriers used throughout the protocols.
SubsystemLabel pol_linear(const std::string& carrier);
SubsystemLabel pol_circular(const std::string& carrier);
SubsystemLabel spatial(const std::string& carrier, int dim = 2);
SubsystemLabel timebin(const std::string& carrier);
SubsystemLabel spin(const std::string& carrier);
SubsystemLabel arrival(const std::string& carrier);

/// Reference to a subsystem by (carrier, kind).
struct SubRef {
  std::string carrier;
  DofKind kind = DofKind::Polarization;
};

inline SubRef pol(const std::string& c) { return {c, DofKind::Polarization}; }
inline SubRef spat(const std::string& c) { return {c, DofKind::Spatial}; }
inline SubRef tbin(const std::string& c) { return {c, DofKind::TimeBin}; }
inline SubRef spn(const std::string& c) { return {c, DofKind::Spin}; }
inline SubRef arr(const std::string& c) { return {c, DofKind::Arrival}; }

/// Ordered subsystem list fixing the tensor basis. The first registered
/// subsystem is the slowest-varying index of the amplitude vector.
class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<SubsystemLabel> labels);

  int count() const { return static_cast<int>(labels_.size()); }
  Eigen::Index dim() const;
  const SubsystemLabel& label(int i) const { return labels_[i]; }
  const std::vector<SubsystemLabel>& labels() const { return labels_; }

  /// Index of the subsystem referenced, or throws naming the reference.
  int index_of(const SubRef& ref) const;
  bool contains(const SubRef& ref) const;

  /// Stride of subsystem i in the flattened amplitude index.
  Eigen::Index stride(int i) const;

  /// Digit of subsystem i in flattened index g.
  int digit(Eigen::Index g, int i) const;

  bool operator==(const SystemLayout& other) const;

 private:
  std::vector<SubsystemLabel> labels_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index dim_ = 1;
  void rebuild_strides();
};

SystemLayout register_layout(std::vector<SubsystemLabel> labels);

/// Normalized pure state over a layout's tensor basis.
struct PureState {
  SystemLayout layout;
  Vector amp;
};

/// Builds a state and enforces unit norm within kNormTol.
PureState make_state(SystemLayout layout, Vector amp);

/// Basis state |digits...> in registration order.
PureState basis_state(const SystemLayout& layout, const std::vector<int>& digits);

/// Tensor product; layouts must not share subsystems.
PureState tensor(const PureState& a, const PureState& b);

/// Weighted list of mutually exclusive pure states on one layout.
struct Ensemble {
  std::vector<std::pair<double, PureState>> members;
};

Ensemble mix(std::vector<std::pair<double, PureState>> members);

/// Tagged classical outcome record, rendered "key=value".
struct OutcomeToken {
  std::string key;
  std::string value;
};

std::string to_string(const OutcomeToken& t);

/// One measurement outcome path.
struct Branch {
  std::vector<OutcomeToken> outcome;
  double probability = 0.0;
  PureState post;
};

/// Applies `matrix` on the listed target subsystems (first target is the
/// slowest-varying index of the matrix basis), identity elsewhere.
/// Rejects non-unitary matrices and dimension mismatches.
PureState apply_unitary(const PureState& state, std::span<const SubRef> targets,
                        const Matrix& matrix);
PureState apply_unitary(const PureState& state, const SubRef& target,
                        const Matrix& matrix);

/// Named projector acting on a target subset.
struct Projector {
  std::string value;
  Matrix op;
};

/// Projective measurement on `targets`. Projectors must be Hermitian
/// idempotents summing to the identity on the measured subspace.
/// Zero-probability branches (p < kBranchCutoff) are dropped.
std::vector<Branch> measure_projective(const PureState& state,
                                       std::span<const SubRef> targets,
                                       const std::vector<Projector>& projectors,
                                       const std::string& token_key);

/// Reduced density matrix on `subset` (registration order of the subset list).
Matrix reduced_density(const PureState& state, std::span<const SubRef> subset);
Matrix reduced_density(const Ensemble& ens, std::span<const SubRef> subset);

/// <target| rho_reduced |target>. Target must be defined on exactly the
/// subset (matching dims). Global-phase invariant by construction.
double fidelity(const PureState& state, const PureState& target,
                std::span<const SubRef> subset);
double fidelity(const Ensemble& ens, const PureState& target,
                std::span<const SubRef> subset);
/// Fidelity on the full layout of `target`.
double fidelity(const PureState& state, const PureState& target);
double fidelity(const Ensemble& ens, const PureState& target);

/// Drops a subsystem that is in the definite basis state `value`
/// (amplitude outside that slice must be < kNormTol).
PureState remove_subsystem(const PureState& state, const SubRef& ref, int value);

/// Replaces the subsystem's label and re-embeds amplitudes through the
/// given (new_dim x old_dim) isometry. Used for UBS and the unbalanced
/// interferometer which grow a register.
PureState promote_subsystem(const PureState& state, const SubRef& ref,
                            const SubsystemLabel& new_label, const Matrix& isometry);

/// Applies an arbitrary operator on the targets (no unitarity check) and
/// returns the branch weight |K psi|^2 with the normalized remainder.
/// Building block for generalized (Kraus) measurements.
std::pair<double, PureState> apply_kraus(const PureState& state,
                                         std::span<const SubRef> targets, const Matrix& op);

// Small matrix helpers shared by the element modules.
Matrix kron(const Matrix& a, const Matrix& b);
bool is_unitary(const Matrix& m, double tol = kUnitaryTol);
double max_abs(const Matrix& m);

}  // namespace hypersim
