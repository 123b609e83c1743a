#pragma once

#include <cstdint>

#include "hypersim/protocols.hpp"

namespace hypersim::analysis {

/// Empirical statistics of one outcome signature against its exact weight.
struct OutcomeStat {
  std::string signature;  // outcome tokens joined with ';'
  double probability = 0;
  long count = 0;
  double frequency = 0;
};

struct SampleResult {
  std::uint64_t seed = 0;
  long trials = 0;
  std::vector<OutcomeStat> outcomes;
};

/// Draws `trials` outcomes from the exactly enumerated branch distribution
/// of a report. Deterministic in (seed, trials); the per-trial substream is
/// derived from (seed, trial index), so the result does not depend on
/// evaluation order.
SampleResult sample(const protocols::ProtocolReport& report, long trials,
                    std::uint64_t seed);

/// True when every |frequency - p| <= 4 sqrt(p(1-p)/N). The largest
/// normalized deviation is written to *worst when given.
bool within_binomial_4sigma(const SampleResult& s, double* worst = nullptr);

/// Column table reproducing one plotted curve family.
struct CurveTable {
  std::string x_name;
  std::vector<double> x;
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  std::map<std::string, std::string> metadata;
};

/// Total concentration success probability of the QND-based protocol under
/// iteration, over an |alpha|^2 grid with |alpha|=|gamma|, |beta|=|delta|.
CurveTable curve_ecp_iteration(const std::vector<double>& alpha2_grid,
                               const std::vector<int>& rounds);

/// Purified per-DOF fidelity per round over an F grid (F1 = F2 = F).
CurveTable curve_epp_fidelity(const std::vector<double>& f_grid,
                              const std::vector<int>& rounds);

/// First-round efficiencies Y0 and Y over an F grid (F1 = F2 = F).
CurveTable curve_epp_efficiency(const std::vector<double>& f_grid);

struct OracleComparison {
  std::string name;
  double max_deviation = 0;
  bool pass = false;
};

/// Elementwise comparison of enumerated values against a closed form.
OracleComparison compare_oracle(const std::string& name,
                                const std::vector<double>& enumerated,
                                const std::vector<double>& closed_form, double tol = 1e-9);

/// Shortest decimal that round-trips to the same double (<= 17 significant
/// digits).
std::string format_double(double v);

std::string to_csv(const CurveTable& table);
CurveTable csv_to_table(const std::string& text);

}  // namespace hypersim::analysis
