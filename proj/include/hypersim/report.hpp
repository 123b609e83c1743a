#pragma once

#include <limits>
#include <map>
#include <optional>

#include "hypersim/core.hpp"

namespace hypersim::protocols {

/// One fully resolved measurement path of a protocol run.
struct ProtocolBranch {
  std::vector<OutcomeToken> outcome;
  double probability = 0.0;
  bool success = false;
  std::string case_label;  // case-classified protocols; empty otherwise
  std::vector<std::string> corrections;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  std::optional<PureState> post;
};

/// Aggregate result of one protocol run. Branch probabilities sum to 1;
/// success_probability is the mass of branches marked success.
struct ProtocolReport {
  std::string protocol;
  std::vector<ProtocolBranch> branches;
  double success_probability = 0.0;
  std::map<std::string, double> metrics;
  std::optional<PureState> output_state;
  std::optional<Ensemble> output_ensemble;

  double branch_probability_sum() const;
  /// Smallest fidelity over branches that carry one (NaN if none do).
  double min_branch_fidelity() const;
  void finalize();  // fills success_probability from the branch list
};

}  // namespace hypersim::protocols
