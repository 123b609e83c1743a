#include <cmath>
#include <stdexcept>

#include "hypersim/optics.hpp"
#include "hypersim/protocols.hpp"
#include "hypersim/qdcavity.hpp"

namespace hypersim::protocols {

namespace {

using optics::DetectBasis;
using optics::Element;

void append(std::vector<OutcomeToken>& into, const std::vector<OutcomeToken>& from) {
  into.insert(into.end(), from.begin(), from.end());
}

PureState bell_target(BellKind k, const SubsystemLabel& x, const SubsystemLabel& y) {
  SystemLayout layout({x, y});
  return make_state(layout, bell_vector(k));
}

// Identifies an ensemble member as |bell_P> (x) |bell_S>; nullopt when the
// member is not a hyper-Bell product.
std::optional<HyperBellLabel> identify_member(const PureState& st, const std::string& x,
                                              const std::string& y) {
  BasisTag tag = st.layout.label(st.layout.index_of(pol(x))).tag;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      HyperBellLabel label{static_cast<BellKind>(i), static_cast<BellKind>(j)};
      PureState probe = make_hyper_bell(label, x, y, tag);
      if (!(probe.layout == st.layout)) return std::nullopt;
      Complex ov = probe.amp.adjoint() * st.amp;
      if (std::abs(std::abs(ov) - 1.0) < 1e-9) return label;
    }
  }
  return std::nullopt;
}

void check_error_family(const Ensemble& ens, const char* which) {
  const auto& layout = ens.members.front().second.layout;
  std::string x = layout.label(0).carrier, y = layout.label(1).carrier;
  for (size_t k = 0; k < ens.members.size(); ++k) {
    auto label = identify_member(ens.members[k].second, x, y);
    bool ok = label && (label->pol == BellKind::PhiPlus || label->pol == BellKind::PsiPlus) &&
              (label->spat == BellKind::PhiPlus || label->spat == BellKind::PhiMinus);
    if (!ok) {
      std::string name = label ? ("|" + to_string(label->pol) + ">_P |" +
                                  to_string(label->spat) + ">_S")
                               : std::string("a non-product state");
      throw std::invalid_argument(std::string("hyper_epp_step1: ") + which + " member " +
                                  std::to_string(k) + " is " + name +
                                  ", outside the bit-flip-P x phase-flip-S family");
    }
  }
}

struct CaseAccumulator {
  double probability = 0;
  std::vector<std::pair<double, PureState>> members;

  // merge members equal up to a global phase; keeps the ensembles at the
  // handful of distinct Bell products they really are
  void add(double w, const PureState& st) {
    for (auto& [mw, ms] : members) {
      if (ms.amp.size() != st.amp.size()) continue;
      Complex ov = ms.amp.adjoint() * st.amp;
      if (std::abs(std::abs(ov) - 1.0) < 1e-9) {
        mw += w;
        return;
      }
    }
    members.push_back({w, st});
  }
};

}  // namespace

EppStep1Result hyper_epp_step1(const Ensemble& rho_ab, const Ensemble& rho_cd) {
  check_error_family(rho_ab, "rho_AB");
  check_error_family(rho_cd, "rho_CD");
  const auto& lab_ab = rho_ab.members.front().second.layout;
  const auto& lab_cd = rho_cd.members.front().second.layout;
  std::string a = lab_ab.label(0).carrier, b = lab_ab.label(1).carrier;
  std::string c = lab_cd.label(0).carrier, d = lab_cd.label(1).carrier;

  EppStep1Result res;
  res.report.protocol = "epp-step1";
  CaseAccumulator acc[4];

  for (const auto& [w_ab, s_ab] : rho_ab.members) {
    for (const auto& [w_cd, s_cd] : rho_cd.members) {
      double w = w_ab * w_cd;
      PureState s = tensor(s_ab, s_cd);
      for (const auto& ph : {a, b, c, d}) s = optics::hadamard_pol(s, ph);
      s = tensor(s, qnd::plus_spin_state("ea1"));
      s = tensor(s, qnd::plus_spin_state("ea2"));
      for (const auto& alice : qnd::ps_qnd(s, a, c, "ea1", "ea2")) {
        PureState s2 = tensor(alice.post, qnd::plus_spin_state("eb1"));
        s2 = tensor(s2, qnd::plus_spin_state("eb2"));
        for (const auto& bob : qnd::ps_qnd(s2, b, d, "eb1", "eb2")) {
          double path_w = w * alice.probability * bob.probability;
          bool pol_same = alice.pol_phase == bob.pol_phase;
          bool spat_same = alice.spat_phase == bob.spat_phase;
          int case_id = pol_same ? (spat_same ? 1 : 3) : (spat_same ? 4 : 2);
          PureState t = bob.post;
          for (const auto& ph : {a, b, c, d}) {
            t = optics::hadamard_pol(t, ph);
            t = optics::hadamard_spatial(t, ph);
          }
          std::vector<OutcomeToken> trail = {
              {"psqnd-pol[" + a + c + "]", alice.pol_phase},
              {"psqnd-spat[" + a + c + "]", alice.spat_phase},
              {"psqnd-pol[" + b + d + "]", bob.pol_phase},
              {"psqnd-spat[" + b + d + "]", bob.spat_phase}};
          if (case_id == 2) {
            acc[1].probability += path_w;
            res.report.branches.push_back(
                {trail, path_w, false, "case-2", {}, NAN, std::move(t)});
            continue;
          }
          t = optics::hadamard_pol(t, c);
          t = optics::hadamard_spatial(t, c);
          t = optics::hadamard_pol(t, d);
          t = optics::hadamard_spatial(t, d);
          for (const auto& dc :
               optics::detect(t, c, {DetectBasis::PolLinear, DetectBasis::SpatialPath})) {
            for (const auto& dd : optics::detect(dc.post, d,
                                                 {DetectBasis::PolLinear,
                                                  DetectBasis::SpatialPath})) {
              ProtocolBranch br;
              br.outcome = trail;
              append(br.outcome, dc.outcome);
              append(br.outcome, dd.outcome);
              br.probability = path_w * dc.probability * dd.probability;
              br.success = true;
              br.case_label = "case-" + std::to_string(case_id);
              PureState f = dd.post;
              if (dc.outcome[0].value != dd.outcome[0].value) {
                f = optics::apply_local(f, b, Element::SigmaZPol);
                br.corrections.push_back("sigma_z_pol[" + b + "]");
              }
              if (dc.outcome[1].value != dd.outcome[1].value) {
                f = optics::apply_local(f, b, Element::SigmaZSpatial);
                br.corrections.push_back("sigma_z_spat[" + b + "]");
              }
              auto& slot = acc[case_id - 1];
              slot.probability += br.probability;
              slot.add(br.probability, f);
              br.post = std::move(f);
              res.report.branches.push_back(std::move(br));
            }
          }
        }
      }
    }
  }

  PureState pol_target = bell_target(BellKind::PhiPlus, pol_circular(a), pol_circular(b));
  PureState spat_target = bell_target(BellKind::PhiPlus, spatial(a), spatial(b));
  const std::vector<SubRef> pol_sub = {pol(a), pol(b)};
  const std::vector<SubRef> spat_sub = {spat(a), spat(b)};

  for (int k = 0; k < 4; ++k) {
    auto& out = res.cases[k];
    out.case_id = k + 1;
    out.probability = acc[k].probability;
    res.report.metrics["p_case_" + std::to_string(k + 1)] = acc[k].probability;
    if (acc[k].members.empty()) continue;
    std::vector<std::pair<double, PureState>> normed;
    for (auto& [pw, st] : acc[k].members) normed.push_back({pw / acc[k].probability, st});
    out.ensemble = mix(std::move(normed));
    out.pol_fidelity = fidelity(*out.ensemble, pol_target, pol_sub);
    out.spat_fidelity = fidelity(*out.ensemble, spat_target, spat_sub);
    res.report.metrics["pol_fidelity_case_" + std::to_string(k + 1)] = out.pol_fidelity;
    res.report.metrics["spat_fidelity_case_" + std::to_string(k + 1)] = out.spat_fidelity;
  }
  res.report.finalize();
  res.report.metrics["y0_enumerated"] = res.cases[0].probability;
  res.report.metrics["y_enumerated"] =
      res.cases[0].probability +
      std::min(res.cases[2].probability, res.cases[3].probability);
  if (res.cases[0].ensemble) res.report.output_ensemble = res.cases[0].ensemble;
  return res;
}

EppStep1Result hyper_epp_step1(double f1, double f2) {
  if (!(f1 > 0.5 && f1 <= 1.0) || !(f2 > 0.5 && f2 <= 1.0)) {
    throw std::invalid_argument("hyper_epp_step1: fidelities must lie in (1/2, 1]");
  }
  Ensemble rho_ab = make_mixed(f1, f2, "A", "B");
  Ensemble rho_cd = make_mixed(f1, f2, "C", "D");
  EppStep1Result res = hyper_epp_step1(rho_ab, rho_cd);
  double fp1 = f1 * f1 / (f1 * f1 + (1 - f1) * (1 - f1));
  double fp2 = f2 * f2 / (f2 * f2 + (1 - f2) * (1 - f2));
  res.report.metrics["form_fidelity_pol"] = fp1;
  res.report.metrics["form_fidelity_spat"] = fp2;
  res.report.metrics["form_y0"] =
      (f1 * f1 + (1 - f1) * (1 - f1)) * (f2 * f2 + (1 - f2) * (1 - f2));
  res.report.metrics["form_y"] = (f1 >= f2) ? f2 * f2 + (1 - f2) * (1 - f2)
                                            : f1 * f1 + (1 - f1) * (1 - f1);
  return res;
}

namespace {

PureState rename_pair(const PureState& st, const std::string& from_x,
                      const std::string& to_x, const std::string& from_y,
                      const std::string& to_y) {
  std::vector<SubsystemLabel> labels = st.layout.labels();
  for (auto& l : labels) {
    if (l.carrier == from_x) l.carrier = to_x;
    else if (l.carrier == from_y) l.carrier = to_y;
  }
  return {SystemLayout(std::move(labels)), st.amp};
}

}  // namespace

ProtocolReport hyper_epp_step2(const EppCaseOutput& first, const EppCaseOutput& second) {
  if (first.case_id == second.case_id) {
    throw std::invalid_argument(
        "hyper_epp_step2: need one case-3 and one case-4 pair, got two case-" +
        std::to_string(first.case_id) + " pairs");
  }
  bool first_is_pol_good = first.case_id == 3;
  if ((first.case_id != 3 && first.case_id != 4) ||
      (second.case_id != 3 && second.case_id != 4)) {
    throw std::invalid_argument("hyper_epp_step2: inputs must come from cases 3 and 4");
  }
  const EppCaseOutput& pol_good = first_is_pol_good ? first : second;   // case 3
  const EppCaseOutput& spat_good = first_is_pol_good ? second : first;  // case 4
  if (!pol_good.ensemble || !spat_good.ensemble) {
    throw std::invalid_argument("hyper_epp_step2: empty case ensemble");
  }

  ProtocolReport rep;
  rep.protocol = "epp-step2";
  CaseAccumulator out_acc;
  double total = 0;

  for (const auto& [w_src, src_raw] : pol_good.ensemble->members) {
    for (const auto& [w_dst, dst_raw] : spat_good.ensemble->members) {
      double w = w_src * w_dst;
      // source pair keeps carriers (A,B); target pair becomes (A2,B2)
      const auto& sl = src_raw.layout;
      PureState src = rename_pair(src_raw, sl.label(0).carrier, "A", sl.label(1).carrier, "B");
      const auto& dl = dst_raw.layout;
      PureState dst = rename_pair(dst_raw, dl.label(0).carrier, "A2", dl.label(1).carrier, "B2");
      PureState s = tensor(src, dst);
      s = tensor(s, qnd::plus_spin_state("ea"));
      for (const auto& qa : qnd::qsjm(s, "A", "A2", "ea")) {
        PureState s2 = tensor(qa.post, qnd::plus_spin_state("eb"));
        for (const auto& qb : qnd::qsjm(s2, "B", "B2", "eb")) {
          ProtocolBranch br;
          br.outcome = qa.outcome;
          append(br.outcome, qb.outcome);
          br.probability = w * qa.probability * qb.probability;
          br.success = true;
          br.corrections = qa.corrections;
          br.corrections.insert(br.corrections.end(), qb.corrections.begin(),
                                qb.corrections.end());
          total += br.probability;
          out_acc.add(br.probability, qb.post);
          br.post = qb.post;
          rep.branches.push_back(std::move(br));
        }
      }
    }
  }

  for (auto& [w, st] : out_acc.members) w /= total;
  Ensemble out = mix(std::move(out_acc.members));
  PureState pol_target =
      bell_target(BellKind::PhiPlus, pol_circular("A2"), pol_circular("B2"));
  PureState spat_target = bell_target(BellKind::PhiPlus, spatial("A2"), spatial("B2"));
  const std::vector<SubRef> pol_sub = {pol("A2"), pol("B2")};
  const std::vector<SubRef> spat_sub = {spat("A2"), spat("B2")};
  rep.metrics["pol_fidelity"] = fidelity(out, pol_target, pol_sub);
  rep.metrics["spat_fidelity"] = fidelity(out, spat_target, spat_sub);
  rep.output_ensemble = std::move(out);
  rep.finalize();
  return rep;
}

ProtocolReport hyper_epp_full(double f1, double f2, int rounds) {
  if (!(f1 > 0.5 && f1 <= 1.0) || !(f2 > 0.5 && f2 <= 1.0)) {
    throw std::invalid_argument("hyper_epp_full: fidelities must lie in (1/2, 1]");
  }
  if (rounds < 1) throw std::invalid_argument("hyper_epp_full: rounds must be >= 1");
  ProtocolReport rep;
  rep.protocol = "epp-full";
  double y0 = (f1 * f1 + (1 - f1) * (1 - f1)) * (f2 * f2 + (1 - f2) * (1 - f2));
  rep.metrics["y0"] = y0;
  rep.metrics["y"] = (f1 >= f2) ? f2 * f2 + (1 - f2) * (1 - f2)
                                : f1 * f1 + (1 - f1) * (1 - f1);
  rep.metrics["y_is_extension"] = (f1 < f2) ? 1 : 0;
  double a = f1, b = f2;
  for (int r = 1; r <= rounds; ++r) {
    a = a * a / (a * a + (1 - a) * (1 - a));
    b = b * b / (b * b + (1 - b) * (1 - b));
    rep.metrics["f1_round_" + std::to_string(r)] = a;
    rep.metrics["f2_round_" + std::to_string(r)] = b;
    rep.metrics["f_round_" + std::to_string(r)] = a * b;
  }
  rep.success_probability = y0;
  return rep;
}

}  // namespace hypersim::protocols
