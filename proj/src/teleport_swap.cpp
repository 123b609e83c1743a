#include <cmath>
#include <map>

#include "hypersim/optics.hpp"
#include "hypersim/protocols.hpp"

namespace hypersim::protocols {

namespace {

using optics::Element;

// Feed-forward fixing a Bell projection back to phi+ with one one-sided
// operator: phi- -> sigma_z, psi+ -> sigma_x, psi- -> -i sigma_y.
struct Correction {
  std::optional<Element> pol;
  std::optional<Element> spat;
  std::vector<std::string> names;
};

Correction correction_for(const HyperBellLabel& label, const std::string& target) {
  Correction c;
  switch (label.pol) {
    case BellKind::PhiPlus: break;
    case BellKind::PhiMinus:
      c.pol = Element::SigmaZPol;
      c.names.push_back("sigma_z_pol[" + target + "]");
      break;
    case BellKind::PsiPlus:
      c.pol = Element::SigmaXPol;
      c.names.push_back("sigma_x_pol[" + target + "]");
      break;
    case BellKind::PsiMinus:
      c.pol = Element::MinusISigmaYPol;
      c.names.push_back("-i_sigma_y_pol[" + target + "]");
      break;
  }
  switch (label.spat) {
    case BellKind::PhiPlus: break;
    case BellKind::PhiMinus:
      c.spat = Element::SigmaZSpatial;
      c.names.push_back("sigma_z_spat[" + target + "]");
      break;
    case BellKind::PsiPlus:
      c.spat = Element::SigmaXSpatial;
      c.names.push_back("sigma_x_spat[" + target + "]");
      break;
    case BellKind::PsiMinus:
      c.spat = Element::MinusISigmaYSpatial;
      c.names.push_back("-i_sigma_y_spat[" + target + "]");
      break;
  }
  return c;
}

PureState apply_correction(const PureState& state, const Correction& c,
                           const std::string& target) {
  PureState s = state;
  if (c.pol) s = optics::apply_local(s, target, *c.pol);
  if (c.spat) s = optics::apply_local(s, target, *c.spat);
  return s;
}

// Aggregates micro measurement records of an analysis-based protocol into
// one branch per identified label.
ProtocolReport labelled_report(const std::string& name, const PureState& input,
                               const std::string& mx, const std::string& my,
                               const std::string& target, const PureState& goal,
                               std::span<const SubRef> goal_subset) {
  ProtocolReport rep;
  rep.protocol = name;
  std::map<std::pair<int, int>, ProtocolBranch> by_label;
  for (const auto& b : hbsa_branches(input, mx, my)) {
    Correction c = correction_for(b.label, target);
    PureState fixed = apply_correction(b.post, c, target);
    double f = fidelity(fixed, goal, goal_subset);
    auto key = std::make_pair(static_cast<int>(b.label.pol), static_cast<int>(b.label.spat));
    auto it = by_label.find(key);
    if (it == by_label.end()) {
      ProtocolBranch pb;
      pb.outcome = {{"label-pol", to_string(b.label.pol)},
                    {"label-spat", to_string(b.label.spat)}};
      pb.probability = b.probability;
      pb.success = true;
      pb.corrections = c.names;
      pb.fidelity = f;
      pb.post = std::move(fixed);
      by_label.emplace(key, std::move(pb));
    } else {
      it->second.probability += b.probability;
      it->second.fidelity = std::min(it->second.fidelity, f);
    }
  }
  for (auto& [key, pb] : by_label) rep.branches.push_back(std::move(pb));
  rep.finalize();
  rep.metrics["min_branch_fidelity"] = rep.min_branch_fidelity();
  return rep;
}

}  // namespace

ProtocolReport teleport(const TeleportParams& p) {
  double n1 = p.alpha * p.alpha + p.beta * p.beta;
  double n2 = p.gamma * p.gamma + p.delta * p.delta;
  if (std::abs(n1 - 1.0) > 1e-9 || std::abs(n2 - 1.0) > 1e-9) {
    throw std::invalid_argument("teleport: input amplitudes must be normalized");
  }
  SystemLayout a_layout = register_layout({pol_linear("A"), spatial("A")});
  Vector a_amp(4);
  a_amp << p.alpha * p.gamma, p.alpha * p.delta, p.beta * p.gamma, p.beta * p.delta;
  PureState photon_a = make_state(a_layout, a_amp);
  PureState channel = make_partial(p.channel, "B", "C");
  PureState input = tensor(photon_a, channel);

  SystemLayout c_layout = register_layout({pol_linear("C"), spatial("C")});
  PureState goal = make_state(c_layout, a_amp);
  const std::vector<SubRef> subset = {pol("C"), spat("C")};
  ProtocolReport rep = labelled_report("teleport", input, "A", "B", "C", goal, subset);
  rep.output_state = rep.branches.front().post;
  return rep;
}

ProtocolReport swap_pairs() {
  PureState ab = make_hyper_bell({}, "A", "B");
  PureState cd = make_hyper_bell({}, "C", "D");
  PureState input = tensor(ab, cd);
  PureState goal = make_hyper_bell({}, "A", "D");
  const std::vector<SubRef> subset = {pol("A"), pol("D"), spat("A"), spat("D")};
  ProtocolReport rep = labelled_report("swap", input, "B", "C", "A", goal, subset);
  rep.output_state = rep.branches.front().post;
  return rep;
}

}  // namespace hypersim::protocols
