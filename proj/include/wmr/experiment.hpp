#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wmr/optweights.hpp"
#include "wmr/recovery.hpp"

namespace wmr {

/// One experiment description shared by the CLI subcommands.  Parsed from a
/// JSON object; every field has a flag override in the CLI.
struct ExperimentConfig {
  SubspacePrior prior;       // angles default to all 45 degrees
  std::uint64_t seed = 1;
  std::vector<int> m_grid;   // default {5, 10, ..., n^2}
  int trials = 50;
  std::vector<std::string> programs = {"nuclear", "weighted_optimal"};
  WeightVector custom_w{1.0, 1.0, 1.0};
  int mc_trials = 500;
  std::string sdim_program = "nuclear";  // nuclear | weighted_optimal | weighted_custom
  std::string out_prefix = "results";
  bool svg = false;
  std::string config_hash;  // hex digest of the canonical JSON
};

ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);  // throws config_error
std::string config_hash_hex(const nlohmann::json& j);

struct PhaseRow {
  std::string program;
  int m = 0;
  int successes = 0;
  int trials = 0;
  double rate = 0.0;
  double mean_rel_err = 0.0;
};

struct PhaseOutput {
  std::vector<PhaseRow> rows;
  double m_hat_nuclear = 0.0;
  double m_hat_weighted = 0.0;  // 0 when no weighted program ran
  WeightVector w_used{1.0, 1.0, 1.0};
};

/// Runs the success-probability sweep; trials within each (program, m) cell
/// run in parallel with per-trial seeds.
PhaseOutput run_phase(const ExperimentConfig& cfg);

std::string phase_csv(const PhaseOutput& out);
std::string phase_svg(const PhaseOutput& out, int n);

nlohmann::json run_weights(const ExperimentConfig& cfg);
nlohmann::json run_sdim(const ExperimentConfig& cfg);

/// Spectral-law and expected-shrinkage reference checks; `lines` receives one
/// "PASS ..."/"FAIL ..." entry per check.
nlohmann::json run_checks(std::uint64_t seed, int trials,
                          std::vector<std::string>* lines = nullptr);

}  // namespace wmr
