#include "hypersim/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hypersim::analysis {

namespace {

std::string signature_of(const protocols::ProtocolBranch& b) {
  std::string s;
  for (const auto& t : b.outcome) {
    if (!s.empty()) s += ';';
    s += to_string(t);
  }
  return s;
}

// splitmix64; the per-trial stream is a hash of (seed, trial index)
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t h = mix64(mix64(seed) ^ mix64(trial + 0x51ed2701ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

SampleResult sample(const protocols::ProtocolReport& report, long trials,
                    std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("sample: trials must be >= 1");
  // collapse branches sharing one signature
  std::vector<OutcomeStat> stats;
  std::map<std::string, size_t> index;
  std::vector<double> cdf;
  for (const auto& b : report.branches) {
    std::string sig = signature_of(b);
    auto it = index.find(sig);
    if (it == index.end()) {
      index[sig] = stats.size();
      stats.push_back({sig, b.probability, 0, 0});
    } else {
      stats[it->second].probability += b.probability;
    }
  }
  double acc = 0;
  std::vector<size_t> order(stats.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (size_t i : order) {
    acc += stats[i].probability;
    cdf.push_back(acc);
  }
  double total = cdf.empty() ? 0 : cdf.back();
  if (total <= 0) throw std::invalid_argument("sample: report has no branch mass");

  for (long t = 0; t < trials; ++t) {
    double u = uniform01(seed, static_cast<std::uint64_t>(t)) * total;
    size_t k = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (k >= stats.size()) k = stats.size() - 1;
    stats[k].count++;
  }
  SampleResult res{seed, trials, std::move(stats)};
  for (auto& o : res.outcomes) {
    o.frequency = static_cast<double>(o.count) / static_cast<double>(trials);
  }
  return res;
}

bool within_binomial_4sigma(const SampleResult& s, double* worst) {
  double w = 0;
  bool ok = true;
  for (const auto& o : s.outcomes) {
    double sigma = std::sqrt(o.probability * (1 - o.probability) /
                             static_cast<double>(s.trials));
    double dev = std::abs(o.frequency - o.probability);
    if (sigma == 0) {
      if (dev > 0) ok = false;
      continue;
    }
    w = std::max(w, dev / sigma);
    if (dev > 4 * sigma) ok = false;
  }
  if (worst) *worst = w;
  return ok;
}

CurveTable curve_ecp_iteration(const std::vector<double>& alpha2_grid,
                               const std::vector<int>& rounds) {
  CurveTable t;
  t.x_name = "alpha2";
  t.metadata["curve"] = "ecp-qnd-iteration-success";
  t.metadata["constraint"] = "alpha=gamma,beta=delta";
  int max_round = 0;
  for (int n : rounds) max_round = std::max(max_round, n);
  for (int n : rounds) t.columns.push_back({"P_n" + std::to_string(n), {}});
  for (double a2 : alpha2_grid) {
    if (!(a2 > 0 && a2 < 1)) {
      throw std::invalid_argument("curve_ecp_iteration: alpha^2 grid must lie in (0,1)");
    }
    t.x.push_back(a2);
    protocols::PartialHyperParams p;
    p.alpha = std::sqrt(a2);
    p.beta = std::sqrt(1 - a2);
    p.gamma = p.alpha;
    p.delta = p.beta;
    auto per_round = protocols::ecp_qnd_round_probabilities(p, max_round);
    size_t col = 0;
    for (int n : rounds) {
      double total = 0;
      for (int k = 0; k < n; ++k) total += per_round[k];
      t.columns[col++].second.push_back(total);
    }
  }
  return t;
}

CurveTable curve_epp_fidelity(const std::vector<double>& f_grid,
                              const std::vector<int>& rounds) {
  CurveTable t;
  t.x_name = "F";
  t.metadata["curve"] = "epp-fidelity-per-round";
  t.metadata["constraint"] = "F1=F2";
  for (int n : rounds) t.columns.push_back({"F_n" + std::to_string(n), {}});
  for (double f : f_grid) {
    if (!(f > 0.5 && f <= 1.0)) {
      throw std::invalid_argument("curve_epp_fidelity: F grid must lie in (1/2, 1]");
    }
    t.x.push_back(f);
    size_t col = 0;
    for (int n : rounds) {
      double v = f;
      for (int k = 0; k < n; ++k) v = v * v / (v * v + (1 - v) * (1 - v));
      t.columns[col++].second.push_back(v);
    }
  }
  return t;
}

CurveTable curve_epp_efficiency(const std::vector<double>& f_grid) {
  CurveTable t;
  t.x_name = "F";
  t.metadata["curve"] = "epp-first-round-efficiency";
  t.metadata["constraint"] = "F1=F2";
  t.columns = {{"Y0", {}}, {"Y", {}}};
  for (double f : f_grid) {
    if (!(f > 0.5 && f <= 1.0)) {
      throw std::invalid_argument("curve_epp_efficiency: F grid must lie in (1/2, 1]");
    }
    t.x.push_back(f);
    double y = f * f + (1 - f) * (1 - f);
    t.columns[0].second.push_back(y * y);
    t.columns[1].second.push_back(y);
  }
  return t;
}

OracleComparison compare_oracle(const std::string& name,
                                const std::vector<double>& enumerated,
                                const std::vector<double>& closed_form, double tol) {
  if (enumerated.size() != closed_form.size()) {
    throw std::invalid_argument("compare_oracle: length mismatch");
  }
  OracleComparison c{name, 0, true};
  for (size_t i = 0; i < enumerated.size(); ++i) {
    c.max_deviation = std::max(c.max_deviation, std::abs(enumerated[i] - closed_form[i]));
  }
  c.pass = c.max_deviation < tol;
  return c;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const CurveTable& table) {
  std::ostringstream os;
  for (const auto& [k, v] : table.metadata) os << "# " << k << "=" << v << "\n";
  os << table.x_name;
  for (const auto& [name, vals] : table.columns) os << "," << name;
  os << "\n";
  for (size_t i = 0; i < table.x.size(); ++i) {
    os << format_double(table.x[i]);
    for (const auto& [name, vals] : table.columns) os << "," << format_double(vals[i]);
    os << "\n";
  }
  return os.str();
}

CurveTable csv_to_table(const std::string& text) {
  CurveTable t;
  std::istringstream is(text);
  std::string line;
  bool header_done = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(2, eq - 2);
        t.metadata[key] = line.substr(eq + 1);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header_done) {
      t.x_name = cells.at(0);
      for (size_t i = 1; i < cells.size(); ++i) t.columns.push_back({cells[i], {}});
      header_done = true;
      continue;
    }
    auto parse = [](const std::string& s) {
      double v = 0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc()) throw std::invalid_argument("csv: bad number " + s);
      return v;
    };
    t.x.push_back(parse(cells.at(0)));
    for (size_t i = 1; i < cells.size(); ++i) t.columns.at(i - 1).second.push_back(parse(cells[i]));
  }
  return t;
}

}  // namespace hypersim::analysis
