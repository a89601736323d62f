#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tactaif/decoder.hpp"
#include "tactaif/inference.hpp"
#include "tactaif/policy.hpp"

namespace tactaif {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PerceptionConfig {
  std::vector<std::string> pegs = {"shaft", "pulley", "cylinder", "cuboid", "elliptical"};
  /// "low": noiseless renders for every peg; "high": per-peg preset noise.
  std::string noise_profile = "low";
  int train_count = 500;
  double train_range_deg = 20.0;
  int epochs = 5;
  int test_count = 100;
  double test_range_deg = 20.0;
  int max_inference_iters = 500;
};

struct DualPolicyConfig {
  std::vector<std::string> scenarios = {"cuboid", "pulley"};
  int episodes = 40;
  int reposition_every = 10;
  bool with_alignment = true;
  bool without_alignment = true;
  bool write_episode_logs = false;
};

struct CalibrationConfig {
  double dt_min = 1e-8;
  double dt_max = 1e-2;
  int points_per_decade = 4;
  std::string reference_peg = "cuboid";
  int max_iters = 500;
  double recovery_tol_deg = 1.0;
  int train_count = 500;
  int train_epochs = 5;
};

struct ExperimentConfig {
  int version = 1;
  std::uint64_t master_seed = 20240501;
  InferenceConfig inference;
  PolicyConfig policy;
  TrainOptions decoder_train;
  TrainOptions baseline_train;
  PerceptionConfig perception;
  DualPolicyConfig dualpolicy;
  CalibrationConfig calibration;

  void validate() const;

  /// Canonical JSON (sorted keys, fixed layout); hashing this is how outputs
  /// are stamped.
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  std::string hash() const;
};

struct PerceptionRow {
  std::string peg;
  double noise = 0.0;
  double mae_supervised_deg = 0.0;
  double mae_proposed_deg = 0.0;
  bool train_diverged = false;
};

struct PerceptionResult {
  std::vector<PerceptionRow> rows;
  std::string config_hash;
};

/// Perceptual-inference experiment: per peg, instant-train the decoder and
/// the supervised baseline on one straight-pose render, evaluate both on a
/// test set built from a distinct render (disjoint noise seed), report MAEs.
/// Writes results.csv, details.csv and config.snapshot under out_dir when
/// given.
PerceptionResult run_perception_experiment(const ExperimentConfig& cfg,
                                           const std::optional<std::filesystem::path>& out_dir);

struct DualPolicyRow {
  std::string scenario;
  bool alignment = true;
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
};

struct DualPolicyResult {
  std::vector<DualPolicyRow> rows;
  std::vector<std::pair<std::string, CampaignResult>> campaigns;  // keyed "scenario/variant"
  std::string config_hash;
};

/// Insertion success-rate experiment over the configured scenarios, with and
/// without the alignment policy on matched seeds.
DualPolicyResult run_dualpolicy_experiment(const ExperimentConfig& cfg,
                                           const std::optional<std::filesystem::path>& out_dir);

struct CalibrationCandidate {
  double step_dt = 0.0;
  bool stable = false;
  double max_recovery_error_deg = 0.0;
  double f_increase_fraction = 0.0;
};

struct CalibrationResult {
  double chosen_dt = 0.0;
  std::vector<CalibrationCandidate> candidates;
  std::string config_hash;
};

/// Logarithmic sweep over step sizes, largest first; picks the largest dt for
/// which noiseless tilt recovery converges with a monotone free-energy tail.
/// Throws CalibrationError when nothing in the sweep is stable.
CalibrationResult calibrate_step_size(const ExperimentConfig& cfg,
                                      const std::optional<std::filesystem::path>& out_dir);

struct GradCheckCase {
  std::string kind;
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;
};

struct GradCheckSummary {
  std::vector<GradCheckCase> cases;
  double worst_layer_error = 0.0;    // across all layer-kind cases
  double worst_decoder_error = 0.0;  // d g / d mu against central differences
  bool passed = false;
};

/// Layer-kind gradient checks (analytic vs central differences) plus the
/// decoder tilt-derivative check. Thresholds: 1e-4 for layers, 1e-3 for the
/// tilt derivative.
GradCheckSummary run_grad_check_suite(int instances_per_kind, std::uint64_t master_seed);

}  // namespace tactaif
