#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tactaif/decoder.hpp"
#include "tactaif/inference.hpp"
#include "tactaif/sim/world.hpp"

namespace tactaif {

struct PolicyConfig {
  /// Initial alignment acts only when the inferred tilt exceeds this.
  double mu_action_threshold_deg = 1.0;
  /// During insertion, switch to the alignment policy when the theta
  /// estimate (mu_hat + phi_ee) exceeds this. Degrees.
  double theta_switch_threshold_deg = 0.7;
  int inference_period = 10;  // ticks between belief refreshes
  int max_episode_steps = 400;
  int initial_inference_max_iters = 1000;
  int refresh_max_iters = 300;
  /// Cold-start every inference from mu = 0 (default); warm start reuses the
  /// previous belief.
  bool warm_start = false;
  bool alignment_enabled = true;

  void validate() const;
};

struct EpisodeLogRow {
  int step = 0;
  double mu_true_deg = 0.0;
  double phi_ee_deg = 0.0;
  double theta_deg = 0.0;
  double depth_mm = 0.0;
  char policy = 'I';  // 'I' insertion, 'A' alignment
};

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  int alignments_performed = 0;
  double final_theta_deg = 0.0;
  double initial_tilt_deg = 0.0;
  std::uint64_t seed = 0;
  std::vector<EpisodeLogRow> log;  // filled when requested
};

/// One dual-policy episode on a prepared world: initial active-inference
/// alignment, then force-controlled insertion with periodic belief refreshes
/// that hand control back to the alignment policy when the theta estimate
/// drifts. Exactly one policy is active per tick. `decoder` may be null only
/// when alignment is disabled.
EpisodeResult run_episode(sim::World& world, const DecoderModel* decoder,
                          const sim::ControllerGains& gains, const sim::ControlTargets& targets,
                          const InferenceConfig& inference, const PolicyConfig& policy,
                          std::uint64_t seed, bool keep_log = false);

/// Everything needed to reproduce a campaign.
struct Scenario {
  std::string name = "cuboid";
  sim::PegSpec peg;
  sim::HoleSpec hole;
  sim::WorldParams world;
  sim::ControllerGains gains;
  sim::ControlTargets targets;
  InferenceConfig inference;
  PolicyConfig policy;
  AugmentConfig decoder_train{1000, -10.0, 10.0, 0};  // seed derived per campaign
  int decoder_epochs = 5;
  TrainOptions train_options;
  double start_offset_range_mm = 10.0;  // +/- initial y and z offsets
};

/// The two reference scenarios: "cuboid" (clearance 0.08 mm) and "pulley"
/// (clearance 0.3 mm).
Scenario scenario_preset(std::string_view name);

struct CampaignResult {
  std::vector<EpisodeResult> episodes;
  int successes = 0;
  double success_rate = 0.0;
};

/// Seeded campaign: trains the decoder once from a straight-pose render,
/// then runs episodes with the start position re-randomized every
/// `reposition_every` episodes and the initial tilt drawn per episode.
/// Matched master seeds give matched initial conditions across variants.
CampaignResult run_campaign(const Scenario& scenario, int n_episodes, int reposition_every,
                            std::uint64_t master_seed);

}  // namespace tactaif
