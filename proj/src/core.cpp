#include "hypersim/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hypersim {

std::string to_string(DofKind kind) {
  switch (kind) {
    case DofKind::Polarization: return "pol";
    case DofKind::Spatial: return "spat";
    case DofKind::TimeBin: return "tbin";
    case DofKind::Spin: return "spin";
    case DofKind::Arrival: return "arr";
  }
  return "?";
}

std::string to_string(BasisTag tag) {
  switch (tag) {
    case BasisTag::Linear: return "linear";
    case BasisTag::Circular: return "circular";
    case BasisTag::Path: return "path";
    case BasisTag::Bin: return "bin";
    case BasisTag::SpinUpDown: return "spin";
    case BasisTag::ArrivalBins: return "arrival";
  }
  return "?";
}

std::string basis_name(BasisTag tag, int index) {
  static const char* linear[] = {"H", "V"};
  static const char* circular[] = {"R", "L"};
  static const char* path[] = {"1", "2", "3"};
  static const char* bin[] = {"S", "L"};
  static const char* spin_names[] = {"up", "dn"};
  static const char* arrival_names[] = {"SS", "SL", "LS", "LL"};
  switch (tag) {
    case BasisTag::Linear: return linear[index];
    case BasisTag::Circular: return circular[index];
    case BasisTag::Path: return path[index];
    case BasisTag::Bin: return bin[index];
    case BasisTag::SpinUpDown: return spin_names[index];
    case BasisTag::ArrivalBins: return arrival_names[index];
  }
  return "?";
}

bool operator==(const SubsystemLabel& a, const SubsystemLabel& b) {
  return a.carrier == b.carrier && a.kind == b.kind && a.dim == b.dim && a.tag == b.tag;
}

namespace {

int tag_cardinality(BasisTag tag, int dim) {
  switch (tag) {
    case BasisTag::Linear:
    case BasisTag::Circular:
    case BasisTag::Bin:
    case BasisTag::SpinUpDown:
      return 2;
    case BasisTag::Path:
      return (dim == 2 || dim == 3) ? dim : -1;
    case BasisTag::ArrivalBins:
      return 4;
  }
  return -1;
}

std::string ref_name(const std::string& carrier, DofKind kind) {
  return to_string(kind) + "[" + carrier + "]";
}

}  // namespace

SubsystemLabel pol_linear(const std::string& c) {
  return {c, DofKind::Polarization, 2, BasisTag::Linear};
}
SubsystemLabel pol_circular(const std::string& c) {
  return {c, DofKind::Polarization, 2, BasisTag::Circular};
}
SubsystemLabel spatial(const std::string& c, int dim) {
  return {c, DofKind::Spatial, dim, BasisTag::Path};
}
SubsystemLabel timebin(const std::string& c) {
  return {c, DofKind::TimeBin, 2, BasisTag::Bin};
}
SubsystemLabel spin(const std::string& c) {
  return {c, DofKind::Spin, 2, BasisTag::SpinUpDown};
}
SubsystemLabel arrival(const std::string& c) {
  return {c, DofKind::Arrival, 4, BasisTag::ArrivalBins};
}

SystemLayout::SystemLayout(std::vector<SubsystemLabel> labels) : labels_(std::move(labels)) {
  for (size_t i = 0; i < labels_.size(); ++i) {
    const auto& l = labels_[i];
    if (l.dim < 2) {
      throw std::invalid_argument("register: " + ref_name(l.carrier, l.kind) +
                                  " has dimension < 2");
    }
    if (tag_cardinality(l.tag, l.dim) != l.dim) {
      throw std::invalid_argument("register: " + ref_name(l.carrier, l.kind) +
                                  " dimension " + std::to_string(l.dim) +
                                  " does not match basis tag " + to_string(l.tag));
    }
    for (size_t j = 0; j < i; ++j) {
      if (labels_[j].carrier == l.carrier && labels_[j].kind == l.kind) {
        throw std::invalid_argument("register: duplicate label " +
                                    ref_name(l.carrier, l.kind));
      }
    }
  }
  rebuild_strides();
}

void SystemLayout::rebuild_strides() {
  strides_.assign(labels_.size(), 1);
  dim_ = 1;
  for (int i = count() - 1; i >= 0; --i) {
    strides_[i] = dim_;
    dim_ *= labels_[i].dim;
  }
  // exact-vector bound: ~14 two-level subsystems
  if (dim_ > (Eigen::Index(1) << 14)) {
    throw std::invalid_argument("layout: state space of dimension " +
                                std::to_string(dim_) +
                                " exceeds the 2^14 exact-enumeration bound");
  }
}

Eigen::Index SystemLayout::dim() const { return dim_; }

int SystemLayout::index_of(const SubRef& ref) const {
  for (int i = 0; i < count(); ++i) {
    if (labels_[i].carrier == ref.carrier && labels_[i].kind == ref.kind) return i;
  }
  throw std::invalid_argument("layout: no subsystem " + ref_name(ref.carrier, ref.kind));
}

bool SystemLayout::contains(const SubRef& ref) const {
  for (const auto& l : labels_) {
    if (l.carrier == ref.carrier && l.kind == ref.kind) return true;
  }
  return false;
}

Eigen::Index SystemLayout::stride(int i) const { return strides_[i]; }

int SystemLayout::digit(Eigen::Index g, int i) const {
  return static_cast<int>((g / strides_[i]) % labels_[i].dim);
}

bool SystemLayout::operator==(const SystemLayout& other) const {
  return labels_ == other.labels_;
}

SystemLayout register_layout(std::vector<SubsystemLabel> labels) {
  if (labels.empty()) throw std::invalid_argument("register: label list is empty");
  return SystemLayout(std::move(labels));
}

PureState make_state(SystemLayout layout, Vector amp) {
  if (amp.size() != layout.dim()) {
    throw std::invalid_argument("state: amplitude length " + std::to_string(amp.size()) +
                                " does not match layout dimension " +
                                std::to_string(layout.dim()));
  }
  double n = amp.norm();
  if (std::abs(n - 1.0) > 1e-9) {
    throw std::invalid_argument("state: norm " + std::to_string(n) + " is not 1");
  }
  if (std::abs(n - 1.0) > kNormTol) amp /= n;
  return {std::move(layout), std::move(amp)};
}

PureState basis_state(const SystemLayout& layout, const std::vector<int>& digits) {
  if (static_cast<int>(digits.size()) != layout.count()) {
    throw std::invalid_argument("basis_state: digit count mismatch");
  }
  Eigen::Index g = 0;
  for (int i = 0; i < layout.count(); ++i) {
    if (digits[i] < 0 || digits[i] >= layout.label(i).dim) {
      throw std::invalid_argument("basis_state: digit out of range");
    }
    g += digits[i] * layout.stride(i);
  }
  Vector amp = Vector::Zero(layout.dim());
  amp[g] = 1.0;
  return {layout, std::move(amp)};
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<SubsystemLabel> labels = a.layout.labels();
  for (const auto& l : b.layout.labels()) labels.push_back(l);
  SystemLayout layout(std::move(labels));
  Vector amp(layout.dim());
  for (Eigen::Index i = 0; i < a.amp.size(); ++i) {
    for (Eigen::Index j = 0; j < b.amp.size(); ++j) {
      amp[i * b.amp.size() + j] = a.amp[i] * b.amp[j];
    }
  }
  return {std::move(layout), std::move(amp)};
}

Ensemble mix(std::vector<std::pair<double, PureState>> members) {
  if (members.empty()) throw std::invalid_argument("mix: empty member list");
  double sum = 0.0;
  for (const auto& [w, st] : members) {
    if (w < 0) throw std::invalid_argument("mix: negative weight");
    if (!(st.layout == members.front().second.layout)) {
      throw std::invalid_argument("mix: members do not share one layout");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    throw std::invalid_argument("mix: weight sum " + std::to_string(sum) +
                                " deviates from 1 by more than 1e-9");
  }
  for (auto& [w, st] : members) w /= sum;
  return {std::move(members)};
}

std::string to_string(const OutcomeToken& t) { return t.key + "=" + t.value; }

namespace {

struct TargetView {
  std::vector<int> idx;            // layout indices of targets
  std::vector<Eigen::Index> strides;
  std::vector<int> dims;
  Eigen::Index subdim = 1;
};

TargetView resolve_targets(const SystemLayout& layout, std::span<const SubRef> targets) {
  TargetView v;
  for (const auto& ref : targets) {
    int i = layout.index_of(ref);
    for (int prev : v.idx) {
      if (prev == i) throw std::invalid_argument("targets: repeated subsystem");
    }
    v.idx.push_back(i);
    v.strides.push_back(layout.stride(i));
    v.dims.push_back(layout.label(i).dim);
    v.subdim *= layout.label(i).dim;
  }
  return v;
}

// Flattened index within the target subspace of global index g
// (first target slowest-varying).
Eigen::Index sub_index(const SystemLayout& layout, const TargetView& v, Eigen::Index g) {
  Eigen::Index s = 0;
  for (size_t k = 0; k < v.idx.size(); ++k) {
    s = s * v.dims[k] + layout.digit(g, v.idx[k]);
  }
  return s;
}

// Global index with the target digits replaced by sub-index s.
Eigen::Index with_sub_index(const SystemLayout& layout, const TargetView& v,
                            Eigen::Index g, Eigen::Index s) {
  Eigen::Index out = g;
  for (int k = static_cast<int>(v.idx.size()) - 1; k >= 0; --k) {
    int digit = static_cast<int>(s % v.dims[k]);
    s /= v.dims[k];
    int old = layout.digit(g, v.idx[k]);
    out += (digit - old) * v.strides[k];
  }
  return out;
}

// Applies an arbitrary (possibly non-square) operator on the target
// subspace; used by apply_unitary, projectors and promote_subsystem.
Vector apply_on_targets(const PureState& state, const TargetView& v, const Matrix& op) {
  const auto& layout = state.layout;
  Vector out = Vector::Zero(state.amp.size());
  Vector x(v.subdim), y(v.subdim);
  for (Eigen::Index g = 0; g < state.amp.size(); ++g) {
    if (sub_index(layout, v, g) != 0) continue;  // one representative per coset
    for (Eigen::Index s = 0; s < v.subdim; ++s) {
      x[s] = state.amp[with_sub_index(layout, v, g, s)];
    }
    y.noalias() = op * x;
    for (Eigen::Index s = 0; s < v.subdim; ++s) {
      out[with_sub_index(layout, v, g, s)] = y[s];
    }
  }
  return out;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Matrix d = m * m.adjoint() - Matrix::Identity(m.rows(), m.cols());
  return max_abs(d) <= tol;
}

PureState apply_unitary(const PureState& state, std::span<const SubRef> targets,
                        const Matrix& matrix) {
  TargetView v = resolve_targets(state.layout, targets);
  if (matrix.rows() != v.subdim || matrix.cols() != v.subdim) {
    throw std::invalid_argument("apply_unitary: matrix dimension " +
                                std::to_string(matrix.rows()) +
                                " does not match target dimension " +
                                std::to_string(v.subdim));
  }
  Matrix dev = matrix * matrix.adjoint() - Matrix::Identity(v.subdim, v.subdim);
  double d = max_abs(dev);
  if (d > kUnitaryTol) {
    throw std::invalid_argument("apply_unitary: matrix is not unitary, max deviation " +
                                std::to_string(d));
  }
  Vector amp = apply_on_targets(state, v, matrix);
  double n = amp.norm();
  if (std::abs(n - 1.0) > kNormTol) amp /= n;
  return {state.layout, std::move(amp)};
}

PureState apply_unitary(const PureState& state, const SubRef& target, const Matrix& matrix) {
  const SubRef refs[] = {target};
  return apply_unitary(state, refs, matrix);
}

std::pair<double, PureState> apply_kraus(const PureState& state,
                                         std::span<const SubRef> targets, const Matrix& op) {
  TargetView v = resolve_targets(state.layout, targets);
  if (op.rows() != v.subdim || op.cols() != v.subdim) {
    throw std::invalid_argument("apply_kraus: operator dimension mismatch");
  }
  Vector amp = apply_on_targets(state, v, op);
  double p = amp.squaredNorm();
  if (p > kBranchCutoff) amp /= std::sqrt(p);
  return {p, PureState{state.layout, std::move(amp)}};
}

std::vector<Branch> measure_projective(const PureState& state,
                                       std::span<const SubRef> targets,
                                       const std::vector<Projector>& projectors,
                                       const std::string& token_key) {
  TargetView v = resolve_targets(state.layout, targets);
  Matrix sum = Matrix::Zero(v.subdim, v.subdim);
  for (const auto& p : projectors) {
    if (p.op.rows() != v.subdim || p.op.cols() != v.subdim) {
      throw std::invalid_argument("measure: projector dimension mismatch");
    }
    if (max_abs(p.op - p.op.adjoint()) > kUnitaryTol ||
        max_abs(p.op * p.op - p.op) > kUnitaryTol) {
      throw std::invalid_argument("measure: projector '" + p.value +
                                  "' is not a Hermitian idempotent");
    }
    sum += p.op;
  }
  double deficiency = max_abs(sum - Matrix::Identity(v.subdim, v.subdim));
  if (deficiency > kUnitaryTol) {
    throw std::invalid_argument("measure: projectors incomplete, deficiency norm " +
                                std::to_string(deficiency));
  }
  std::vector<Branch> out;
  for (const auto& p : projectors) {
    Vector amp = apply_on_targets(state, v, p.op);
    double prob = amp.squaredNorm();
    if (prob < kBranchCutoff) continue;
    amp /= std::sqrt(prob);
    Branch b;
    b.outcome.push_back({token_key, p.value});
    b.probability = prob;
    b.post = {state.layout, std::move(amp)};
    out.push_back(std::move(b));
  }
  return out;
}

Matrix reduced_density(const PureState& state, std::span<const SubRef> subset) {
  TargetView v = resolve_targets(state.layout, subset);
  Matrix rho = Matrix::Zero(v.subdim, v.subdim);
  for (Eigen::Index g = 0; g < state.amp.size(); ++g) {
    if (sub_index(state.layout, v, g) != 0) continue;
    for (Eigen::Index i = 0; i < v.subdim; ++i) {
      Complex ai = state.amp[with_sub_index(state.layout, v, g, i)];
      if (ai == Complex(0, 0)) continue;
      for (Eigen::Index j = 0; j < v.subdim; ++j) {
        Complex aj = state.amp[with_sub_index(state.layout, v, g, j)];
        rho(i, j) += ai * std::conj(aj);
      }
    }
  }
  return rho;
}

Matrix reduced_density(const Ensemble& ens, std::span<const SubRef> subset) {
  Matrix rho;
  bool first = true;
  for (const auto& [w, st] : ens.members) {
    Matrix r = reduced_density(st, subset);
    if (first) {
      rho = w * r;
      first = false;
    } else {
      rho += w * r;
    }
  }
  return rho;
}

namespace {

void check_target_matches(const SystemLayout& target_layout, const TargetView& v) {
  if (target_layout.count() != static_cast<int>(v.idx.size())) {
    throw std::invalid_argument("fidelity: target layout does not match subset");
  }
  for (size_t k = 0; k < v.idx.size(); ++k) {
    if (target_layout.label(static_cast<int>(k)).dim != v.dims[k]) {
      throw std::invalid_argument("fidelity: target subsystem dimension mismatch");
    }
  }
}

double clamp01(double x) {
  if (x < 0 && x > -kNormTol) return 0.0;
  return x;
}

}  // namespace

double fidelity(const PureState& state, const PureState& target,
                std::span<const SubRef> subset) {
  TargetView v = resolve_targets(state.layout, subset);
  check_target_matches(target.layout, v);
  Matrix rho = reduced_density(state, subset);
  Complex f = target.amp.adjoint() * rho * target.amp;
  return clamp01(f.real());
}

double fidelity(const Ensemble& ens, const PureState& target,
                std::span<const SubRef> subset) {
  double f = 0;
  for (const auto& [w, st] : ens.members) f += w * fidelity(st, target, subset);
  return f;
}

double fidelity(const PureState& state, const PureState& target) {
  std::vector<SubRef> all;
  for (const auto& l : target.layout.labels()) all.push_back({l.carrier, l.kind});
  return fidelity(state, target, all);
}

double fidelity(const Ensemble& ens, const PureState& target) {
  double f = 0;
  for (const auto& [w, st] : ens.members) f += w * fidelity(st, target);
  return f;
}

PureState remove_subsystem(const PureState& state, const SubRef& ref, int value) {
  int i = state.layout.index_of(ref);
  const auto& lab = state.layout.label(i);
  if (value < 0 || value >= lab.dim) {
    throw std::invalid_argument("remove_subsystem: value out of range");
  }
  std::vector<SubsystemLabel> labels;
  for (int k = 0; k < state.layout.count(); ++k) {
    if (k != i) labels.push_back(state.layout.label(k));
  }
  SystemLayout new_layout(std::move(labels));
  Vector amp(new_layout.dim());
  Eigen::Index n = 0;
  double leak = 0;
  for (Eigen::Index g = 0; g < state.amp.size(); ++g) {
    if (state.layout.digit(g, i) == value) {
      amp[n++] = state.amp[g];
    } else {
      leak += std::norm(state.amp[g]);
    }
  }
  if (leak > kNormTol) {
    throw std::invalid_argument("remove_subsystem: subsystem is not in the definite state " +
                                basis_name(lab.tag, value));
  }
  double nn = amp.norm();
  amp /= nn;
  return {std::move(new_layout), std::move(amp)};
}

PureState promote_subsystem(const PureState& state, const SubRef& ref,
                            const SubsystemLabel& new_label, const Matrix& isometry) {
  int i = state.layout.index_of(ref);
  const auto& old_label = state.layout.label(i);
  if (isometry.cols() != old_label.dim || isometry.rows() != new_label.dim) {
    throw std::invalid_argument("promote_subsystem: isometry shape mismatch");
  }
  Matrix gram = isometry.adjoint() * isometry;
  if (max_abs(gram - Matrix::Identity(old_label.dim, old_label.dim)) > kUnitaryTol) {
    throw std::invalid_argument("promote_subsystem: embedding is not an isometry");
  }
  std::vector<SubsystemLabel> labels = state.layout.labels();
  labels[i] = new_label;
  SystemLayout new_layout(std::move(labels));
  Vector amp = Vector::Zero(new_layout.dim());
  for (Eigen::Index g = 0; g < state.amp.size(); ++g) {
    if (state.amp[g] == Complex(0, 0)) continue;
    int old_digit = state.layout.digit(g, i);
    // index with subsystem i removed, then rebuilt in the new layout
    for (int nd = 0; nd < new_label.dim; ++nd) {
      if (isometry(nd, old_digit) == Complex(0, 0)) continue;
      Eigen::Index ng = 0;
      for (int k = 0; k < state.layout.count(); ++k) {
        int digit = (k == i) ? nd : state.layout.digit(g, k);
        ng += digit * new_layout.stride(k);
      }
      amp[ng] += isometry(nd, old_digit) * state.amp[g];
    }
  }
  double n = amp.norm();
  if (std::abs(n - 1.0) > kNormTol) amp /= n;
  return {std::move(new_layout), std::move(amp)};
}

}  // namespace hypersim
