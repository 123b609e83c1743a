#include <stdexcept>

#include "hypersim/optics.hpp"
#include "hypersim/protocols.hpp"
#include "hypersim/xkerr.hpp"

namespace hypersim::protocols {

namespace {

BellKind classify(bool even_parity, bool same_tokens) {
  if (even_parity) return same_tokens ? BellKind::PhiPlus : BellKind::PhiMinus;
  return same_tokens ? BellKind::PsiPlus : BellKind::PsiMinus;
}

void append(std::vector<OutcomeToken>& into, const std::vector<OutcomeToken>& from) {
  into.insert(into.end(), from.begin(), from.end());
}

}  // namespace

std::vector<HbsaBranch> hbsa_branches(const PureState& state, const std::string& x,
                                      const std::string& y) {
  std::vector<HbsaBranch> out;
  for (const auto& sp : qnd::xkerr_parity_spatial(state, x, y)) {
    bool spat_even = (sp.outcome[0].value == "shifted");
    PureState s = optics::hadamard_spatial(sp.post, x);
    s = optics::hadamard_spatial(s, y);
    for (const auto& an : qnd::xkerr_spatial_analyzer(s, x, y)) {
      std::string modes = qnd::analyzer_modes(an.outcome[0].value);
      BellKind spat_label = classify(spat_even, modes[0] == modes[1]);
      for (const auto& pp : qnd::xkerr_parity_pol(an.post, x, y)) {
        bool pol_even = (pp.outcome[0].value == "shifted");
        PureState t = optics::hadamard_pol(pp.post, x);
        t = optics::hadamard_pol(t, y);
        for (const auto& dx :
             optics::detect(t, x, {optics::DetectBasis::PolLinear,
                                   optics::DetectBasis::SpatialPath})) {
          for (const auto& dy :
               optics::detect(dx.post, y, {optics::DetectBasis::PolLinear,
                                           optics::DetectBasis::SpatialPath})) {
            HbsaBranch b;
            b.label.spat = spat_label;
            b.label.pol = classify(pol_even, dx.outcome[0].value == dy.outcome[0].value);
            append(b.outcome, sp.outcome);
            append(b.outcome, an.outcome);
            append(b.outcome, pp.outcome);
            append(b.outcome, dx.outcome);
            append(b.outcome, dy.outcome);
            b.probability = sp.probability * an.probability * pp.probability *
                            dx.probability * dy.probability;
            b.post = dy.post;
            out.push_back(std::move(b));
          }
        }
      }
    }
  }
  return out;
}

ProtocolReport hbsa(const PureState& state, const std::string& x, const std::string& y) {
  ProtocolReport rep;
  rep.protocol = "hbsa";
  // aggregate the measurement micro-record by identified label
  std::map<std::pair<int, int>, ProtocolBranch> by_label;
  for (auto& b : hbsa_branches(state, x, y)) {
    auto key = std::make_pair(static_cast<int>(b.label.pol), static_cast<int>(b.label.spat));
    auto it = by_label.find(key);
    if (it == by_label.end()) {
      ProtocolBranch pb;
      pb.outcome = {{"label-pol", to_string(b.label.pol)},
                    {"label-spat", to_string(b.label.spat)}};
      pb.probability = b.probability;
      pb.success = true;
      pb.post = b.post;
      by_label.emplace(key, std::move(pb));
    } else {
      it->second.probability += b.probability;
    }
  }
  for (auto& [key, pb] : by_label) rep.branches.push_back(std::move(pb));
  rep.finalize();
  return rep;
}

ProtocolReport hbsa(const HyperBellLabel& label) {
  PureState in = make_hyper_bell(label, "A", "B");
  ProtocolReport rep = hbsa(in, "A", "B");
  const auto* top = &rep.branches.front();
  for (const auto& b : rep.branches) {
    if (b.probability > top->probability) top = &b;
  }
  rep.metrics["top_branch_probability"] = top->probability;
  rep.metrics["label_correct"] =
      (top->outcome[0].value == to_string(label.pol) &&
       top->outcome[1].value == to_string(label.spat))
          ? 1.0
          : 0.0;
  return rep;
}

}  // namespace hypersim::protocols
