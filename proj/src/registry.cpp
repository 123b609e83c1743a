#include "hypersim/registry.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <json.hpp>

#include "hypersim/analysis.hpp"
#include "hypersim/protocols.hpp"
#include "hypersim/qdcavity.hpp"

namespace hypersim::cli {

namespace {

using json = nlohmann::json;
using protocols::ProtocolReport;
using analysis::CurveTable;

struct TypedParams {
  std::map<std::string, double> reals;
  std::map<std::string, long> ints;
  std::map<std::string, std::string> labels;
  double real(const std::string& k) const { return reals.at(k); }
  long integer(const std::string& k) const { return ints.at(k); }
  const std::string& label(const std::string& k) const { return labels.at(k); }
};

using Output = std::variant<ProtocolReport, CurveTable>;
using Runner = std::function<Output(const TypedParams&)>;

struct Entry {
  ProtocolInfo info;
  Runner run;
};

const double kS = 1.0 / std::sqrt(2.0);

std::vector<double> grid(double lo, double hi, int points) {
  std::vector<double> g;
  if (points < 2) {
    g.push_back(lo);
    return g;
  }
  for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
  return g;
}

std::vector<int> round_list(long n) {
  std::vector<int> r;
  for (int k = 1; k <= n; ++k) r.push_back(k);
  return r;
}

protocols::PartialHyperParams params4(const TypedParams& p) {
  return {p.real("alpha"), p.real("beta"), p.real("gamma"), p.real("delta")};
}

std::vector<Entry> build_registry() {
  std::vector<Entry> reg;
  auto real = [](const std::string& n, double v, const std::string& doc) {
    return ParamSpec{n, ParamType::Real, analysis::format_double(v), doc};
  };
  auto integer = [](const std::string& n, long v, const std::string& doc) {
    return ParamSpec{n, ParamType::Int, std::to_string(v), doc};
  };
  auto label = [](const std::string& n, const std::string& v, const std::string& doc) {
    return ParamSpec{n, ParamType::Label, v, doc};
  };

  reg.push_back({{"hbsa",
                  "\xC2\xA7""3.2",
                  {label("pol", "phi+", "polarization Bell label"),
                   label("spat", "phi+", "spatial Bell label")},
                  false},
                 [](const TypedParams& p) -> Output {
                   protocols::HyperBellLabel l{protocols::parse_bell(p.label("pol")),
                                               protocols::parse_bell(p.label("spat"))};
                   return protocols::hbsa(l);
                 }});

  reg.push_back({{"teleport",
                  "\xC2\xA7""3.3",
                  {real("alpha", 1, "input H amplitude"), real("beta", 0, "input V amplitude"),
                   real("gamma", 1, "input port-1 amplitude"),
                   real("delta", 0, "input port-2 amplitude")},
                  false},
                 [](const TypedParams& p) -> Output {
                   protocols::TeleportParams tp;
                   tp.alpha = p.real("alpha");
                   tp.beta = p.real("beta");
                   tp.gamma = p.real("gamma");
                   tp.delta = p.real("delta");
                   return protocols::teleport(tp);
                 }});

  reg.push_back({{"swap", "\xC2\xA7""3.4", {}, false},
                 [](const TypedParams&) -> Output { return protocols::swap_pairs(); }});

  reg.push_back({{"ecp-param-split",
                  "\xC2\xA7""4.2",
                  {real("alpha", 0.8, ""), real("beta", 0.6, ""), real("gamma", 0.6, ""),
                   real("delta", 0.8, ""), integer("permute", 0, "allow relabelling")},
                  false},
                 [](const TypedParams& p) -> Output {
                   return protocols::ecp_param_split(params4(p), p.integer("permute") != 0);
                 }});

  reg.push_back({{"ecp-schmidt-linear",
                  "\xC2\xA7""4.3.1",
                  {real("alpha", kS, ""), real("beta", kS, ""), real("gamma", kS, ""),
                   real("delta", kS, "")},
                  false},
                 [](const TypedParams& p) -> Output {
                   return protocols::ecp_schmidt_linear(params4(p));
                 }});

  reg.push_back({{"ecp-qnd-iterative",
                  "\xC2\xA7""4.3.2",
                  {real("alpha", 0.6, ""), real("beta", 0.8, ""), real("gamma", 0.6, ""),
                   real("delta", 0.8, ""), integer("rounds", 2, "iteration count")},
                  false},
                 [](const TypedParams& p) -> Output {
                   return protocols::ecp_qnd_iterative(params4(p),
                                                       static_cast<int>(p.integer("rounds")));
                 }});

  reg.push_back({{"ecp-timebin",
                  "\xC2\xA7""4.4",
                  {real("alpha", kS, ""), real("beta", kS, ""), real("delta", kS, ""),
                   real("eta", kS, "")},
                  false},
                 [](const TypedParams& p) -> Output {
                   protocols::TimebinParams tp{p.real("alpha"), p.real("beta"),
                                               p.real("delta"), p.real("eta")};
                   return protocols::ecp_timebin(tp);
                 }});

  reg.push_back({{"epp-step1",
                  "\xC2\xA7""5.2",
                  {real("F1", 0.8, "phi+ weight, polarization"),
                   real("F2", 0.8, "phi+ weight, spatial")},
                  false},
                 [](const TypedParams& p) -> Output {
                   return protocols::hyper_epp_step1(p.real("F1"), p.real("F2")).report;
                 }});

  reg.push_back({{"epp-step2",
                  "\xC2\xA7""5.2",
                  {real("F1", 0.8, ""), real("F2", 0.8, "")},
                  false},
                 [](const TypedParams& p) -> Output {
                   auto s1 = protocols::hyper_epp_step1(p.real("F1"), p.real("F2"));
                   return protocols::hyper_epp_step2(s1.cases[2], s1.cases[3]);
                 }});

  reg.push_back({{"epp-full",
                  "\xC2\xA7""5.2",
                  {real("F1", 0.8, ""), real("F2", 0.8, ""), integer("rounds", 3, "")},
                  false},
                 [](const TypedParams& p) -> Output {
                   return protocols::hyper_epp_full(p.real("F1"), p.real("F2"),
                                                    static_cast<int>(p.integer("rounds")));
                 }});

  reg.push_back(
      {{"hyper-cnot",
        "\xC2\xA7""6",
        {real("pol_a0", 1, "photon A R amplitude"), real("pol_a1", 0, "photon A L amplitude"),
         real("spat_a0", 1, ""), real("spat_a1", 0, ""), real("pol_b0", 1, ""),
         real("pol_b1", 0, ""), real("spat_b0", 1, ""), real("spat_b1", 0, "")},
        false},
       [](const TypedParams& p) -> Output {
         protocols::HyperCnotInput in;
         in.pol_a[0] = p.real("pol_a0");
         in.pol_a[1] = p.real("pol_a1");
         in.spat_a[0] = p.real("spat_a0");
         in.spat_a[1] = p.real("spat_a1");
         in.pol_b[0] = p.real("pol_b0");
         in.pol_b[1] = p.real("pol_b1");
         in.spat_b[0] = p.real("spat_b0");
         in.spat_b[1] = p.real("spat_b1");
         return protocols::hyper_cnot(in);
       }});

  reg.push_back({{"qd-coefficients",
                  "\xC2\xA7""5.2",
                  {real("g", 2, "coupling, units of kappa"), real("kappa", 1, ""),
                   real("kappa_s", 0, ""), real("gamma_e", 0.1, "exciton decay"),
                   real("omega", 0, "detuning of the photon"),
                   real("omega_c", 0, ""), real("omega_x", 0, "")},
                  true},
                 [](const TypedParams& p) -> Output {
                   qnd::CavityParams cp{p.real("g"),      p.real("kappa"),
                                        p.real("kappa_s"), p.real("gamma_e"),
                                        p.real("omega"),  p.real("omega_c"),
                                        p.real("omega_x")};
                   auto [r, t] = qnd::qd_coefficients(cp);
                   CurveTable tab;
                   tab.x_name = "omega";
                   tab.x = {p.real("omega")};
                   tab.columns = {{"r_re", {r.real()}},
                                  {"r_im", {r.imag()}},
                                  {"t_re", {t.real()}},
                                  {"t_im", {t.imag()}}};
                   tab.metadata["table"] = "qd-reflection-transmission";
                   return tab;
                 }});

  reg.push_back({{"curve-ecp-iteration",
                  "\xC2\xA7""4.3.2",
                  {real("alpha2_min", 0.05, ""), real("alpha2_max", 0.5, ""),
                   integer("points", 10, ""), integer("rounds", 5, "")},
                  true},
                 [](const TypedParams& p) -> Output {
                   return analysis::curve_ecp_iteration(
                       grid(p.real("alpha2_min"), p.real("alpha2_max"),
                            static_cast<int>(p.integer("points"))),
                       round_list(p.integer("rounds")));
                 }});

  reg.push_back({{"curve-epp-fidelity",
                  "\xC2\xA7""5.2",
                  {real("f_min", 0.55, ""), real("f_max", 1.0, ""), integer("points", 10, ""),
                   integer("rounds", 3, "")},
                  true},
                 [](const TypedParams& p) -> Output {
                   return analysis::curve_epp_fidelity(
                       grid(p.real("f_min"), p.real("f_max"),
                            static_cast<int>(p.integer("points"))),
                       round_list(p.integer("rounds")));
                 }});

  reg.push_back({{"curve-epp-efficiency",
                  "\xC2\xA7""5.2",
                  {real("f_min", 0.55, ""), real("f_max", 1.0, ""), integer("points", 10, "")},
                  true},
                 [](const TypedParams& p) -> Output {
                   return analysis::curve_epp_efficiency(grid(
                       p.real("f_min"), p.real("f_max"), static_cast<int>(p.integer("points"))));
                 }});

  return reg;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> reg = build_registry();
  return reg;
}

const Entry* find_entry(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.info.name == name) return &e;
  }
  return nullptr;
}

TypedParams parse_params(const Entry& e, const std::map<std::string, std::string>& given) {
  for (const auto& [k, v] : given) {
    bool known = false;
    for (const auto& spec : e.info.params) known |= (spec.name == k);
    if (!known) {
      throw std::invalid_argument("unknown parameter '" + k + "' for protocol " +
                                  e.info.name);
    }
  }
  TypedParams out;
  for (const auto& spec : e.info.params) {
    auto it = given.find(spec.name);
    const std::string& raw = (it == given.end()) ? spec.default_value : it->second;
    switch (spec.type) {
      case ParamType::Real: {
        double v = 0;
        auto r = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (r.ec != std::errc() || r.ptr != raw.data() + raw.size()) {
          throw std::invalid_argument("parameter '" + spec.name + "' expects a real, got '" +
                                      raw + "'");
        }
        out.reals[spec.name] = v;
        break;
      }
      case ParamType::Int: {
        long v = 0;
        auto r = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (r.ec != std::errc() || r.ptr != raw.data() + raw.size()) {
          throw std::invalid_argument("parameter '" + spec.name +
                                      "' expects an integer, got '" + raw + "'");
        }
        out.ints[spec.name] = v;
        break;
      }
      case ParamType::Label:
        out.labels[spec.name] = raw;
        break;
    }
  }
  return out;
}

json metadata_json(const RunConfig& c) {
  json meta;
  meta["tool"] = "hypersim";
  meta["version"] = kToolVersion;
  meta["protocol"] = c.protocol;
  meta["mode"] = c.mode;
  meta["seed"] = c.seed;
  meta["trials"] = c.trials;
  json params = json::object();
  for (const auto& [k, v] : c.parameters) params[k] = v;
  meta["parameters"] = params;
  return meta;
}

json state_json(const PureState& st) {
  json j;
  json layout = json::array();
  for (const auto& l : st.layout.labels()) {
    layout.push_back({{"carrier", l.carrier},
                      {"dof", hypersim::to_string(l.kind)},
                      {"dim", l.dim},
                      {"basis", hypersim::to_string(l.tag)}});
  }
  j["layout"] = layout;
  json amps = json::array();
  for (Eigen::Index i = 0; i < st.amp.size(); ++i) {
    amps.push_back({st.amp[i].real(), st.amp[i].imag()});
  }
  j["amplitudes"] = amps;
  return j;
}

json report_json(const ProtocolReport& rep) {
  json j;
  j["protocol"] = rep.protocol;
  j["success_probability"] = rep.success_probability;
  json branches = json::array();
  for (const auto& b : rep.branches) {
    json bj;
    json tokens = json::array();
    for (const auto& t : b.outcome) tokens.push_back(to_string(t));
    bj["outcome"] = tokens;
    bj["probability"] = b.probability;
    bj["success"] = b.success;
    if (!b.case_label.empty()) bj["case"] = b.case_label;
    bj["corrections"] = b.corrections;
    if (!std::isnan(b.fidelity)) bj["fidelity"] = b.fidelity;
    branches.push_back(std::move(bj));
  }
  j["branches"] = branches;
  json metrics = json::object();
  for (const auto& [k, v] : rep.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  if (rep.output_state) j["output_state"] = state_json(*rep.output_state);
  if (rep.output_ensemble) {
    json members = json::array();
    for (const auto& [w, st] : rep.output_ensemble->members) {
      members.push_back({{"weight", w}, {"state", state_json(st)}});
    }
    j["output_ensemble"] = members;
  }
  return j;
}

json table_json(const CurveTable& t) {
  json j;
  j["x_name"] = t.x_name;
  j["x"] = t.x;
  json cols = json::object();
  for (const auto& [name, vals] : t.columns) cols[name] = vals;
  j["columns"] = cols;
  json meta = json::object();
  for (const auto& [k, v] : t.metadata) meta[k] = v;
  j["table_metadata"] = meta;
  return j;
}

std::string report_csv(const RunConfig& c, const ProtocolReport& rep) {
  std::ostringstream os;
  os << "# protocol=" << c.protocol << "\n";
  os << "# mode=" << c.mode << "\n";
  os << "# seed=" << c.seed << "\n";
  os << "# version=" << kToolVersion << "\n";
  for (const auto& [k, v] : rep.metrics) {
    os << "# metric " << k << "=" << analysis::format_double(v) << "\n";
  }
  os << "outcome,probability,success,case,corrections,fidelity\n";
  for (const auto& b : rep.branches) {
    std::string sig;
    for (const auto& t : b.outcome) {
      if (!sig.empty()) sig += ';';
      sig += to_string(t);
    }
    std::string corr;
    for (const auto& cc : b.corrections) {
      if (!corr.empty()) corr += ';';
      corr += cc;
    }
    os << sig << "," << analysis::format_double(b.probability) << ","
       << (b.success ? 1 : 0) << "," << b.case_label << "," << corr << ","
       << (std::isnan(b.fidelity) ? "" : analysis::format_double(b.fidelity)) << "\n";
  }
  return os.str();
}

std::string sample_csv(const RunConfig& c, const analysis::SampleResult& s) {
  std::ostringstream os;
  os << "# protocol=" << c.protocol << "\n";
  os << "# mode=sample\n";
  os << "# seed=" << c.seed << "\n";
  os << "# trials=" << c.trials << "\n";
  os << "# version=" << kToolVersion << "\n";
  os << "outcome,probability,count,frequency\n";
  for (const auto& o : s.outcomes) {
    os << o.signature << "," << analysis::format_double(o.probability) << "," << o.count
       << "," << analysis::format_double(o.frequency) << "\n";
  }
  return os.str();
}

}  // namespace

const std::vector<ProtocolInfo>& list_protocols() {
  static const std::vector<ProtocolInfo> infos = [] {
    std::vector<ProtocolInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

std::string render_protocol_list() {
  std::ostringstream os;
  os << "protocol                 guide   parameters\n";
  for (const auto& info : list_protocols()) {
    std::string params;
    for (const auto& p : info.params) {
      if (!params.empty()) params += ", ";
      params += p.name + "=" + p.default_value;
    }
    std::string name = info.name;
    name.resize(24, ' ');
    std::string anchor = info.anchor;
    while (anchor.size() < 8) anchor += ' ';
    os << name << " " << anchor << params << "\n";
  }
  return os.str();
}

RunConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  RunConfig c;
  if (j.contains("protocol")) c.protocol = j["protocol"].get<std::string>();
  if (j.contains("parameters")) {
    for (auto& [k, v] : j["parameters"].items()) {
      c.parameters[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
  if (j.contains("trials")) c.trials = j["trials"].get<long>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output-path")) c.output_path = j["output-path"].get<std::string>();
  if (j.contains("output-format")) c.output_format = j["output-format"].get<std::string>();
  return c;
}

RunResult run(const RunConfig& config) {
  const Entry* entry = find_entry(config.protocol);
  if (!entry) {
    return {kExitUnknownProtocol, "unknown protocol '" + config.protocol + "'", ""};
  }
  if (config.mode != "exact" && config.mode != "sample") {
    return {kExitInvalidParams, "mode must be 'exact' or 'sample'", ""};
  }
  if (config.mode == "sample" && config.trials < 1) {
    return {kExitInvalidParams, "sample mode requires trials >= 1", ""};
  }
  if (config.output_format != "json" && config.output_format != "csv") {
    return {kExitInvalidParams, "format must be 'json' or 'csv'", ""};
  }

  Output out;
  try {
    TypedParams tp = parse_params(*entry, config.parameters);
    out = entry->run(tp);
  } catch (const std::invalid_argument& e) {
    return {kExitInvalidParams, e.what(), ""};
  }

  std::string payload;
  if (std::holds_alternative<CurveTable>(out)) {
    const auto& table = std::get<CurveTable>(out);
    if (config.output_format == "csv") {
      std::ostringstream os;
      os << "# protocol=" << config.protocol << "\n";
      os << "# mode=" << config.mode << "\n";
      os << "# seed=" << config.seed << "\n";
      os << "# version=" << kToolVersion << "\n";
      os << analysis::to_csv(table);
      payload = os.str();
    } else {
      json j;
      j["metadata"] = metadata_json(config);
      j["table"] = table_json(table);
      payload = j.dump(2) + "\n";
    }
  } else {
    const auto& rep = std::get<ProtocolReport>(out);
    if (config.mode == "sample") {
      analysis::SampleResult s = analysis::sample(rep, config.trials, config.seed);
      if (config.output_format == "csv") {
        payload = sample_csv(config, s);
      } else {
        json j;
        j["metadata"] = metadata_json(config);
        j["report"] = report_json(rep);
        json sj = json::array();
        for (const auto& o : s.outcomes) {
          sj.push_back({{"outcome", o.signature},
                        {"probability", o.probability},
                        {"count", o.count},
                        {"frequency", o.frequency}});
        }
        j["sample"] = sj;
        payload = j.dump(2) + "\n";
      }
    } else {
      if (config.output_format == "csv") {
        payload = report_csv(config, rep);
      } else {
        json j;
        j["metadata"] = metadata_json(config);
        j["report"] = report_json(rep);
        payload = j.dump(2) + "\n";
      }
    }
  }

  if (!config.output_path.empty()) {
    std::ofstream f(config.output_path, std::ios::binary | std::ios::trunc);
    if (!f) return {kExitIoFailure, "cannot open output path " + config.output_path, payload};
    f << payload;
    if (!f.good()) return {kExitIoFailure, "write failed for " + config.output_path, payload};
  }
  return {kExitOk, "", payload};
}

}  // namespace hypersim::cli
