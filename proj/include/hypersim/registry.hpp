#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hypersim::cli {

enum class ParamType { Real, Int, Label };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::Real;
  std::string default_value;
  std::string doc;
};

/// One registered protocol: the CLI name, the anchor of its section in the
/// README protocol guide, and its parameter schema.
struct ProtocolInfo {
  std::string name;
  std::string anchor;
  std::vector<ParamSpec> params;
  bool emits_table = false;  // curve protocols emit a table, others a report
};

const std::vector<ProtocolInfo>& list_protocols();

struct RunConfig {
  std::string protocol;
  std::map<std::string, std::string> parameters;
  std::string mode = "exact";  // "exact" | "sample"
  long trials = 0;             // required iff mode == "sample"
  std::uint64_t seed = 0;
  std::string output_path;     // empty -> stdout
  std::string output_format = "json";  // "json" | "csv"
};

// Exit-code contract: 0 ok, 2 unknown protocol, 3 invalid parameters,
// 4 I/O failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnknownProtocol = 2;
inline constexpr int kExitInvalidParams = 3;
inline constexpr int kExitIoFailure = 4;

struct RunResult {
  int exit_code = 0;
  std::string message;  // diagnostic on failure
  std::string payload;  // rendered output (also written to output_path)
};

/// Validates the config, runs the protocol, renders and (when output_path
/// is set) writes the result. Deterministic for a fixed config.
RunResult run(const RunConfig& config);

/// Parses a JSON config document into a RunConfig.
RunConfig config_from_json(const std::string& text);

/// Plain-text table for --list.
std::string render_protocol_list();

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace hypersim::cli
