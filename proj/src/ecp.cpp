#include <cmath>
#include <stdexcept>

#include "hypersim/optics.hpp"
#include "hypersim/protocols.hpp"
#include "hypersim/xkerr.hpp"

namespace hypersim::protocols {

namespace {

using optics::DetectBasis;
using optics::Element;

void append(std::vector<OutcomeToken>& into, const std::vector<OutcomeToken>& from) {
  into.insert(into.end(), from.begin(), from.end());
}

// phi_AB = (|HH>+|VV>)(|a1 b1>+|a2 b2>)/2 on whatever spatial widths the
// layout of `like` currently has.
PureState maximal_pair_target(const SystemLayout& like, const std::string& x,
                              const std::string& y) {
  std::vector<SubsystemLabel> labels = {
      like.label(like.index_of(pol(x))), like.label(like.index_of(pol(y))),
      like.label(like.index_of(spat(x))), like.label(like.index_of(spat(y)))};
  SystemLayout layout{labels};
  Vector amp = Vector::Zero(layout.dim());
  for (int p2 = 0; p2 < 2; ++p2) {
    for (int s = 0; s < 2; ++s) {
      Eigen::Index g = p2 * layout.stride(0) + p2 * layout.stride(1) +
                       s * layout.stride(2) + s * layout.stride(3);
      amp[g] = 0.5;
    }
  }
  return {layout, amp};
}

const std::vector<SubRef> kPairSubset(const std::string& x, const std::string& y) {
  return {pol(x), pol(y), spat(x), spat(y)};
}

}  // namespace

ProtocolReport ecp_param_split(const PartialHyperParams& raw, bool permute) {
  PartialHyperParams p = validate_params(raw);
  ProtocolReport rep;
  rep.protocol = "ecp-param-split";

  bool pol_swapped = std::abs(p.alpha) < std::abs(p.beta);
  bool spat_swapped = std::abs(p.gamma) > std::abs(p.delta);
  if ((pol_swapped || spat_swapped) && !permute) {
    throw std::invalid_argument(
        "ecp_param_split: parameter ordering requires |alpha|>=|beta|, "
        "|gamma|<=|delta|; pass the permutation flag to relabel");
  }
  if (pol_swapped) std::swap(p.alpha, p.beta);
  if (spat_swapped) std::swap(p.gamma, p.delta);
  rep.metrics["pol_relabelled"] = pol_swapped ? 1 : 0;
  rep.metrics["spat_relabelled"] = spat_swapped ? 1 : 0;

  PureState state = make_partial(p, "A", "B");

  struct Stage {
    PureState state;
    double weight;
    std::vector<OutcomeToken> outcome;
  };
  std::vector<Stage> live;

  // spatial splitting: UBS on a2, then the a3 port feeds detector D3
  bool split_spatial = std::abs(p.delta) - std::abs(p.gamma) > 1e-12;
  if (split_spatial) {
    double r = p.gamma / p.delta;
    PureState s = optics::ubs_split(state, "A", r);
    Matrix keep = Matrix::Zero(3, 3), fail = Matrix::Zero(3, 3);
    keep(0, 0) = keep(1, 1) = 1;
    fail(2, 2) = 1;
    const SubRef target[] = {spat("A")};
    for (auto& b : measure_projective(s, target, {{"pass", keep}, {"a3", fail}}, "ubs[A]")) {
      if (b.outcome[0].value == "a3") {
        ProtocolBranch fb;
        fb.outcome = b.outcome;
        fb.probability = b.probability;
        fb.success = false;
        fb.case_label = "fail-a3";
        fb.post = b.post;
        rep.branches.push_back(std::move(fb));
      } else {
        live.push_back({b.post, b.probability, b.outcome});
      }
    }
  } else {
    live.push_back({state, 1.0, {}});
  }

  // polarization splitting: PBS pair routes H through R_theta, the rotated
  // vertical component leaves on the primed ports
  bool split_pol = std::abs(p.alpha) - std::abs(p.beta) > 1e-12;
  std::vector<Stage> kept;
  for (auto& st : live) {
    if (!split_pol) {
      kept.push_back(st);
      continue;
    }
    double cos_t = p.beta / p.alpha;
    double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    int spat_dim = st.state.layout.label(st.state.layout.index_of(spat("A"))).dim;
    const std::vector<SubRef> targets = {pol("A"), spat("A")};
    // keep: H amplitude scaled on the unsplit ports, V untouched
    Matrix keep = Matrix::Identity(2 * spat_dim, 2 * spat_dim);
    keep(0, 0) = cos_t;  // (H, a1)
    keep(1, 1) = cos_t;  // (H, a2)
    auto [pk, sk] = apply_kraus(st.state, targets, keep);
    if (pk > kBranchCutoff) {
      Stage ks{sk, st.weight * pk, st.outcome};
      ks.outcome.push_back({"split[A]", "keep"});
      kept.push_back(std::move(ks));
    }
    for (int m = 0; m < 2; ++m) {
      Matrix fail = Matrix::Zero(2 * spat_dim, 2 * spat_dim);
      fail(m, m) = sin_t;  // project on (H, a_m), photon leaves on a'_m
      auto [pf, sf] = apply_kraus(st.state, targets, fail);
      if (pf <= kBranchCutoff) continue;
      ProtocolBranch fb;
      fb.outcome = st.outcome;
      fb.outcome.push_back({"split[A]", m == 0 ? "a1'" : "a2'"});
      fb.probability = st.weight * pf;
      fb.success = false;
      fb.case_label = "fail-primed";
      // detector D_m consumes photon A
      PureState without = remove_subsystem(sf, pol("A"), 0);
      fb.post = remove_subsystem(without, spat("A"), m);
      rep.branches.push_back(std::move(fb));
    }
  }

  for (auto& st : kept) {
    ProtocolBranch sb;
    sb.outcome = st.outcome;
    sb.outcome.push_back({"result", "success"});
    sb.probability = st.weight;
    sb.success = true;
    PureState target = maximal_pair_target(st.state.layout, "A", "B");
    sb.fidelity = fidelity(st.state, target, kPairSubset("A", "B"));
    sb.post = st.state;
    rep.branches.push_back(std::move(sb));
  }

  rep.finalize();
  rep.metrics["success_formula"] = 4.0 * p.beta * p.beta * p.gamma * p.gamma;
  rep.metrics["min_branch_fidelity"] = rep.min_branch_fidelity();
  return rep;
}

ProtocolReport ecp_schmidt_linear(const PartialHyperParams& raw) {
  PartialHyperParams p = validate_params(raw);
  ProtocolReport rep;
  rep.protocol = "ecp-schmidt-linear";

  PureState state = tensor(make_partial(p, "A", "B"), make_partial(p, "C", "D"));
  state = optics::apply_local(state, "C", Element::SigmaXPol);
  state = optics::apply_local(state, "D", Element::SigmaXPol);

  PureState target = maximal_pair_target(state.layout, "A", "B");
  const auto subset = kPairSubset("A", "B");

  for (const auto& pb : optics::pbs_parity_check(state, "A", "C")) {
    if (pb.outcome[0].value != "even") {
      rep.branches.push_back(
          {pb.outcome, pb.probability, false, "fail-pol-parity", {}, NAN, pb.post});
      continue;
    }
    for (const auto& hb : optics::bs_hom_parity(pb.post, "B", "D")) {
      std::vector<OutcomeToken> trail = pb.outcome;
      append(trail, hb.outcome);
      if (hb.outcome[0].value != "odd") {
        rep.branches.push_back(
            {trail, pb.probability * hb.probability, false, "fail-spat-parity", {}, NAN,
             hb.post});
        continue;
      }
      PureState s = optics::hadamard_pol(hb.post, "C");
      s = optics::hadamard_pol(s, "D");
      s = optics::hadamard_spatial(s, "C");
      s = optics::hadamard_spatial(s, "D");
      for (const auto& dc :
           optics::detect(s, "C", {DetectBasis::PolLinear, DetectBasis::SpatialPath})) {
        for (const auto& dd : optics::detect(dc.post, "D",
                                             {DetectBasis::PolLinear,
                                              DetectBasis::SpatialPath})) {
          ProtocolBranch b;
          b.outcome = trail;
          append(b.outcome, dc.outcome);
          append(b.outcome, dd.outcome);
          b.probability =
              pb.probability * hb.probability * dc.probability * dd.probability;
          b.success = true;
          PureState f = dd.post;
          if (dc.outcome[0].value != dd.outcome[0].value) {
            f = optics::apply_local(f, "B", Element::SigmaZPol);
            b.corrections.push_back("sigma_z_pol[B]");
          }
          if (dc.outcome[1].value != dd.outcome[1].value) {
            f = optics::apply_local(f, "B", Element::SigmaZSpatial);
            b.corrections.push_back("sigma_z_spat[B]");
          }
          b.fidelity = fidelity(f, target, subset);
          b.post = std::move(f);
          rep.branches.push_back(std::move(b));
        }
      }
    }
  }

  rep.finalize();
  rep.metrics["success_formula"] =
      4.0 * std::pow(p.alpha * p.beta * p.gamma * p.delta, 2);
  rep.metrics["min_branch_fidelity"] = rep.min_branch_fidelity();
  return rep;
}

// ---------------------------------------------------------------------------
// Iterative concentration with parity-check QNDs
// ---------------------------------------------------------------------------

namespace {

// Coefficient family of the surviving pair between rounds: each DOF is
// either already maximal or carries a (big, small) amplitude pair.
struct Family {
  bool pol_maximal = false;
  double pol_big = 1 / std::sqrt(2.0), pol_small = 1 / std::sqrt(2.0);
  bool spat_maximal = false;
  double spat_big = 1 / std::sqrt(2.0), spat_small = 1 / std::sqrt(2.0);
};

std::pair<double, double> squared_renorm(double a, double b) {
  double x = a * a, y = b * b;
  double n = std::sqrt(x * x + y * y);
  if (n == 0) return {1, 0};
  return {x / n, y / n};
}

PartialHyperParams family_params(const Family& f) {
  PartialHyperParams p;
  const double s = 1 / std::sqrt(2.0);
  p.alpha = f.pol_maximal ? s : f.pol_big;
  p.beta = f.pol_maximal ? s : f.pol_small;
  p.gamma = f.spat_maximal ? s : f.spat_big;
  p.delta = f.spat_maximal ? s : f.spat_small;
  return p;
}

struct RoundResult {
  double p_success = 0;
  double min_success_fidelity = 1;
  // residual weight per (pol still partial?, spat still partial?) family
  double w_bb = 0, w_mb = 0, w_bm = 0;
  std::vector<ProtocolBranch> branches;  // measurement record of this round
};

// One enumerated round of the QND-based concentration on two identical
// pairs drawn from the family.
RoundResult run_qnd_round(const Family& fam) {
  RoundResult out;
  PartialHyperParams p = family_params(fam);
  PureState state = tensor(make_partial(p, "A", "B"), make_partial(p, "C", "D"));
  PureState target = maximal_pair_target(state.layout, "A", "B");
  const auto subset = kPairSubset("A", "B");

  for (const auto& pb : qnd::xkerr_parity_pol(state, "A", "C")) {
    bool pol_even = pb.outcome[0].value == "shifted";
    for (const auto& sb : qnd::xkerr_parity_spatial(pb.post, "B", "D")) {
      bool spat_even = sb.outcome[0].value == "shifted";
      bool pol_done = fam.pol_maximal || !pol_even;
      bool spat_done = fam.spat_maximal || !spat_even;
      PureState s = optics::hadamard_pol(sb.post, "C");
      s = optics::hadamard_pol(s, "D");
      s = optics::hadamard_spatial(s, "C");
      s = optics::hadamard_spatial(s, "D");
      for (const auto& dc :
           optics::detect(s, "C", {DetectBasis::PolLinear, DetectBasis::SpatialPath})) {
        for (const auto& dd : optics::detect(dc.post, "D",
                                             {DetectBasis::PolLinear,
                                              DetectBasis::SpatialPath})) {
          ProtocolBranch b;
          b.outcome = pb.outcome;
          append(b.outcome, sb.outcome);
          append(b.outcome, dc.outcome);
          append(b.outcome, dd.outcome);
          b.probability =
              pb.probability * sb.probability * dc.probability * dd.probability;
          PureState f = dd.post;
          if (dc.outcome[0].value != dd.outcome[0].value) {
            f = optics::apply_local(f, "B", Element::SigmaZPol);
            b.corrections.push_back("sigma_z_pol[B]");
          }
          if (dc.outcome[1].value != dd.outcome[1].value) {
            f = optics::apply_local(f, "B", Element::SigmaZSpatial);
            b.corrections.push_back("sigma_z_spat[B]");
          }
          b.success = pol_done && spat_done;
          b.case_label = b.success ? "success"
                         : (!pol_done && !spat_done)
                             ? "residual-both"
                             : (!pol_done ? "residual-pol" : "residual-spat");
          if (b.success) {
            b.fidelity = fidelity(f, target, subset);
            out.p_success += b.probability;
            out.min_success_fidelity = std::min(out.min_success_fidelity, b.fidelity);
          } else if (!pol_done && !spat_done) {
            out.w_bb += b.probability;
          } else if (!pol_done) {
            out.w_bm += b.probability;  // pol still partial, spat solved
          } else {
            out.w_mb += b.probability;  // spat still partial, pol solved
          }
          b.post = std::move(f);
          out.branches.push_back(std::move(b));
        }
      }
    }
  }
  return out;
}

Family next_family(const Family& fam, bool pol_partial, bool spat_partial) {
  Family next;
  next.pol_maximal = !pol_partial;
  next.spat_maximal = !spat_partial;
  if (pol_partial) {
    auto [a, b] = squared_renorm(fam.pol_big, fam.pol_small);
    next.pol_big = a;
    next.pol_small = b;
  }
  if (spat_partial) {
    auto [a, b] = squared_renorm(fam.spat_big, fam.spat_small);
    next.spat_big = a;
    next.spat_small = b;
  }
  return next;
}

}  // namespace

std::vector<double> ecp_qnd_round_probabilities(const PartialHyperParams& raw, int rounds) {
  PartialHyperParams p = validate_params(raw);
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  // weights per family, advanced by the closed-form case probabilities
  struct W {
    Family fam;
    double w;
  };
  std::vector<W> level = {{Family{false, p.alpha, p.beta, false, p.gamma, p.delta}, 1.0}};
  std::vector<double> per_round;
  for (int r = 0; r < rounds; ++r) {
    double p_round = 0;
    std::vector<W> next;
    auto add = [&next](const Family& f, double w) {
      if (w <= 0) return;
      for (auto& e : next) {
        if (e.fam.pol_maximal == f.pol_maximal && e.fam.spat_maximal == f.spat_maximal) {
          e.w += w;
          return;
        }
      }
      next.push_back({f, w});
    };
    for (const auto& e : level) {
      PartialHyperParams q = family_params(e.fam);
      double a2 = q.alpha * q.alpha, b2 = q.beta * q.beta;
      double c2 = q.gamma * q.gamma, d2 = q.delta * q.delta;
      double pol_odd = 2 * a2 * b2, pol_even = a2 * a2 + b2 * b2;
      double spat_odd = 2 * c2 * d2, spat_even = c2 * c2 + d2 * d2;
      if (e.fam.pol_maximal && e.fam.spat_maximal) continue;
      if (e.fam.pol_maximal) {
        p_round += e.w * spat_odd;
        add(next_family(e.fam, false, true), e.w * spat_even);
      } else if (e.fam.spat_maximal) {
        p_round += e.w * pol_odd;
        add(next_family(e.fam, true, false), e.w * pol_even);
      } else {
        p_round += e.w * pol_odd * spat_odd;
        add(next_family(e.fam, true, true), e.w * pol_even * spat_even);
        add(next_family(e.fam, true, false), e.w * pol_even * spat_odd);
        add(next_family(e.fam, false, true), e.w * pol_odd * spat_even);
      }
    }
    per_round.push_back(p_round);
    level = std::move(next);
  }
  return per_round;
}

ProtocolReport ecp_qnd_iterative(const PartialHyperParams& raw, int rounds) {
  if (rounds < 1) throw std::invalid_argument("ecp_qnd_iterative: rounds must be >= 1");
  PartialHyperParams p = validate_params(raw);
  ProtocolReport rep;
  rep.protocol = "ecp-qnd-iterative";

  struct W {
    Family fam;
    double w;
  };
  std::vector<W> level = {{Family{false, p.alpha, p.beta, false, p.gamma, p.delta}, 1.0}};
  double total = 0;
  double min_fid = 1;
  for (int r = 1; r <= rounds; ++r) {
    double p_round = 0;
    std::vector<W> next;
    auto add = [&next](const Family& f, double w) {
      if (w <= kBranchCutoff) return;
      for (auto& e : next) {
        if (e.fam.pol_maximal == f.pol_maximal && e.fam.spat_maximal == f.spat_maximal) {
          e.w += w;
          return;
        }
      }
      next.push_back({f, w});
    };
    for (const auto& e : level) {
      RoundResult rr = run_qnd_round(e.fam);
      p_round += e.w * rr.p_success;
      if (rr.p_success > 0) min_fid = std::min(min_fid, rr.min_success_fidelity);
      add(next_family(e.fam, true, true), e.w * rr.w_bb);
      add(next_family(e.fam, false, true), e.w * rr.w_mb);
      add(next_family(e.fam, true, false), e.w * rr.w_bm);
      if (r == 1) {
        rep.branches = std::move(rr.branches);  // round-1 measurement record
      } else if (r == 2) {
        // per-path contributions, keyed by which DOFs were still partial
        std::string key = (!e.fam.pol_maximal && !e.fam.spat_maximal) ? "both"
                          : e.fam.pol_maximal ? "spat"
                                              : "pol";
        rep.metrics["p_round_2_" + key] = e.w * rr.p_success;
      }
    }
    rep.metrics["p_round_" + std::to_string(r)] = p_round;
    total += p_round;
    rep.metrics["p_total_" + std::to_string(r)] = total;
    level = std::move(next);
  }
  rep.finalize();
  rep.success_probability = rep.metrics["p_total_1"];  // branch list covers round 1
  rep.metrics["p_total"] = total;
  rep.metrics["min_success_fidelity"] = min_fid;

  // closed forms quoted for cross-checking
  double a2 = p.alpha * p.alpha, b2 = p.beta * p.beta;
  double c2 = p.gamma * p.gamma, d2 = p.delta * p.delta;
  double a4 = a2 * a2, b4 = b2 * b2, c4 = c2 * c2, d4 = d2 * d2;
  rep.metrics["form_p1"] = 4 * a2 * b2 * c2 * d2;
  rep.metrics["form_p1_even_even"] = (a4 + b4) * (c4 + d4);
  rep.metrics["form_p1_odd_even"] = 2 * a2 * b2 * (c4 + d4);
  rep.metrics["form_p1_even_odd"] = 2 * c2 * d2 * (a4 + b4);
  rep.metrics["form_p2_1"] = 4 * a4 * b4 * c4 * d4 / ((a4 + b4) * (c4 + d4));
  rep.metrics["form_p2_2"] = 4 * c4 * d4 * a2 * b2 / (c4 + d4);
  rep.metrics["form_p2_3"] = 4 * a4 * b4 * c2 * d2 / (a4 + b4);
  return rep;
}

// ---------------------------------------------------------------------------
// Polarization-time-bin concentration
// ---------------------------------------------------------------------------

ProtocolReport ecp_timebin(const TimebinParams& tp) {
  PartialHyperParams p =
      validate_params({tp.alpha, tp.beta, tp.delta, tp.eta});
  ProtocolReport rep;
  rep.protocol = "ecp-timebin";

  PureState state = tensor(make_partial(p, "A", "B", BasisTag::Linear, DofKind::TimeBin),
                           make_partial(p, "C", "D", BasisTag::Linear, DofKind::TimeBin));
  state = optics::apply_local(state, "C", Element::SigmaXPol);
  state = optics::apply_local(state, "D", Element::SigmaXPol);
  state = optics::apply_local(state, "C", Element::SigmaXTimeBin);
  state = optics::apply_local(state, "D", Element::SigmaXTimeBin);

  // psi++ = (|HH>+|VV>)(|SS>+|LL>)/2
  SystemLayout tlay = register_layout(
      {pol_linear("A"), pol_linear("B"), timebin("A"), timebin("B")});
  Vector tamp = Vector::Zero(16);
  for (int pp = 0; pp < 2; ++pp)
    for (int tt = 0; tt < 2; ++tt)
      tamp[pp * tlay.stride(0) + pp * tlay.stride(1) + tt * tlay.stride(2) +
           tt * tlay.stride(3)] = 0.5;
  PureState target = make_state(tlay, tamp);
  const std::vector<SubRef> subset = {pol("A"), pol("B"), tbin("A"), tbin("B")};

  for (const auto& ac : optics::pbs_parity_check(state, "A", "C")) {
    if (ac.outcome[0].value != "even") {
      rep.branches.push_back(
          {ac.outcome, ac.probability, false, "fail-pol-parity", {}, NAN, ac.post});
      continue;
    }
    PureState s = optics::pockels(ac.post, "B", 1);
    s = optics::pockels(s, "D", 1);
    for (const auto& bd : optics::pbs_parity_check(s, "B", "D")) {
      std::vector<OutcomeToken> trail = ac.outcome;
      append(trail, bd.outcome);
      if (bd.outcome[0].value != "even") {
        rep.branches.push_back({trail, ac.probability * bd.probability, false,
                                "fail-bin-parity", {}, NAN, bd.post});
        continue;
      }
      PureState t = optics::pockels(bd.post, "B", 1);
      t = optics::unbalanced_interferometer(t, "C");
      t = optics::unbalanced_interferometer(t, "D");
      for (const auto& dc :
           optics::detect(t, "C", {DetectBasis::PolDiagonal, DetectBasis::ArrivalClass})) {
        for (const auto& dd : optics::detect(dc.post, "D",
                                             {DetectBasis::PolDiagonal,
                                              DetectBasis::ArrivalClass})) {
          ProtocolBranch b;
          b.outcome = trail;
          append(b.outcome, dc.outcome);
          append(b.outcome, dd.outcome);
          b.probability =
              ac.probability * bd.probability * dc.probability * dd.probability;
          std::string arr_c = optics::arrival_class(dc.outcome[1].value);
          std::string arr_d = optics::arrival_class(dd.outcome[1].value);
          if (arr_c != "middle" || arr_d != "middle") {
            b.success = false;
            b.case_label = "fail-arrival";
            b.post = dd.post;
            rep.branches.push_back(std::move(b));
            continue;
          }
          int eps_c = dc.outcome[0].value == "H" ? 1 : -1;
          int eps_d = dd.outcome[0].value == "H" ? 1 : -1;
          int port_c = dc.outcome[1].value == "middle+" ? 1 : -1;
          int port_d = dd.outcome[1].value == "middle+" ? 1 : -1;
          int pol_sign = eps_c * eps_d;
          int bin_sign = eps_d * port_c * port_d;
          PureState f = dd.post;
          if (pol_sign < 0) {
            f = optics::apply_local(f, "B", Element::SigmaZPol);
            b.corrections.push_back("sigma_z_pol[B]");
          }
          if (bin_sign < 0) {
            f = optics::apply_local(f, "B", Element::SigmaZTimeBin);
            b.corrections.push_back("sigma_z_tbin[B]");
          }
          b.success = true;
          b.case_label = "success";
          b.fidelity = fidelity(f, target, subset);
          b.post = std::move(f);
          rep.branches.push_back(std::move(b));
        }
      }
    }
  }

  rep.finalize();
  rep.metrics["success_formula"] =
      std::pow(p.alpha * p.beta * p.gamma * p.delta, 2);
  rep.metrics["min_branch_fidelity"] = rep.min_branch_fidelity();
  return rep;
}

}  // namespace hypersim::protocols
