#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "obsvkit/observability.hpp"
#include "obsvkit/scenario.hpp"

namespace obsvkit {

inline constexpr const char* kToolVersion = "0.1.0";

struct ToleranceSet {
  double rank_tol{kRankTolAnalytic};
  double check_tol{kCheckTol};
  double gap_tol{kGapTol};
  double bracket_tol{kBracketTol};
};

struct AnalyzeConfig {
  SystemMode mode{SystemMode::kVins};
  int features{2};
  int trials{4};
  std::uint64_t seed{1};
  Degeneracy degeneracy{Degeneracy::kNone};
  ToleranceSet tol;
  int threads{0};        // 0 keeps the runtime default
  std::string out_path;  // empty: no report file
};

struct VerifyConfig {
  std::string what{"identities"};  // gradients | identities | brackets | flow
  int trials{8};
  std::uint64_t seed{1};
  double duration{0.8};
  double dt{kDefaultDt};
  std::string out_path;
};

// Throw InvalidConfig on out-of-range or inconsistent settings.
void validate(const AnalyzeConfig& cfg);
void validate(const VerifyConfig& cfg);

struct RunResult {
  nlohmann::json report;
  bool all_passed{false};
};

// Samples `trials` scenarios and runs the full nullspace-structure check on
// each; degenerate geometry is analyzed rather than failed. The report is
// deterministic for a fixed config except for the recorded wall time.
RunResult run_analyze(const AnalyzeConfig& cfg);

// Focused verification batteries: observation-gradient factorization,
// algebraic identities of the chart and closed-form rows, symmetry brackets,
// or flow invariance of the unobservable span.
RunResult run_verify(const VerifyConfig& cfg);

// Writes via a temp file in the target directory plus rename, so readers
// never observe a partial report.
void write_json_atomic(const std::string& path, const nlohmann::json& j);

}  // namespace obsvkit
