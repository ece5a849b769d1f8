#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hmclab/limitlaw.hpp"
#include "hmclab/rng.hpp"

namespace hmclab {

/// Version string of the form v<major>.<minor>.<patch>[-g<commit>[-dirty]].
const char* version();

enum class Profile { kQuick, kFull };

Profile parse_profile(const std::string& name);
std::string profile_name(Profile p);

/// Experiment names accepted by run().
const std::vector<std::string>& experiment_names();

/// Run configuration. Zero / empty fields mean "use the profile default for
/// this experiment" and are filled in by resolve().
struct ExperimentConfig {
  std::string experiment = "verify-all";
  std::vector<std::size_t> n_grid;
  std::size_t replicas = 0;
  std::uint64_t seed = 20240917;
  std::size_t L = 0;
  std::size_t m_points = 0;
  std::string output_dir = "hmclab-out";
  unsigned workers = 1;
  std::string profile = "quick";

  /// Strict parse: unknown keys and wrongly typed values throw SchemaError
  /// naming the key.
  static ExperimentConfig from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;

  /// Copy with every defaulted field made explicit; throws SchemaError on
  /// invariant violations (unknown experiment, replicas < 1, n < 2 ...).
  [[nodiscard]] ExperimentConfig resolve() const;
};

/// Outcome of one acceptance criterion.
struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<TestReport> reports;
  bool pass = false;
  double seconds = 0.0;
};

void to_json(nlohmann::json& j, const CriterionResult& c);

struct RunManifest {
  nlohmann::json config;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<CriterionResult> criteria;
  bool pass = false;

  /// Flattened reports of all criteria.
  [[nodiscard]] std::vector<TestReport> reports() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Execution parameters shared by the criterion runners.
struct RunContext {
  Seed seed{20240917};
  unsigned workers = 1;
  Profile profile = Profile::kFull;
  std::size_t replicas = 0;         ///< 0: criterion default
  std::vector<std::size_t> n_grid;  ///< empty: criterion default
  std::size_t L = 0;                ///< 0: criterion default
  std::size_t m_points = 0;         ///< 0: criterion default
  std::string output_dir;           ///< empty: no files written
};

CriterionResult check_series_oracle(const RunContext& ctx);        // 1
CriterionResult check_exact_moments(const RunContext& ctx);        // 2
CriterionResult check_restricted_triangle(const RunContext& ctx);  // 3
CriterionResult check_parseval(const RunContext& ctx);             // 4
CriterionResult check_dickman(const RunContext& ctx);              // 5
CriterionResult check_limit_law(const RunContext& ctx);            // 6
CriterionResult check_convergence(const RunContext& ctx);          // 7
CriterionResult check_split(const RunContext& ctx);                // 8
CriterionResult check_cue(const RunContext& ctx);                  // 9
CriterionResult check_gmc(const RunContext& ctx);                  // 10
CriterionResult check_toeplitz(const RunContext& ctx);             // 11

/// Criterion ids that an experiment runs.
std::vector<int> criteria_for(const std::string& experiment);

/// Runs criterion `id` (1..11).
CriterionResult run_criterion(int id, const RunContext& ctx);

/// Resolves the config, runs the experiment, writes manifest.json and CSVs
/// to output_dir. IoError if output_dir cannot be created or written.
RunManifest run(const ExperimentConfig& config);

/// CSV with header `value` and one sample per row at 17 significant digits.
/// DomainError for empty input; IoError (carrying the path) on failure.
void emit_distribution_csv(const std::vector<double>& samples, const std::string& path);

/// Parses a file written by emit_distribution_csv.
std::vector<double> read_distribution_csv(const std::string& path);

}  // namespace hmclab
