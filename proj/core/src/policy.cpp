#include "tactaif/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace tactaif {

void PolicyConfig::validate() const {
  if (!(mu_action_threshold_deg > 0.0) || !(theta_switch_threshold_deg > 0.0)) {
    throw std::invalid_argument("PolicyConfig: thresholds must be positive");
  }
  if (inference_period < 1) {
    throw std::invalid_argument("PolicyConfig: inference_period must be >= 1");
  }
  if (max_episode_steps < 1 || initial_inference_max_iters < 1 || refresh_max_iters < 1) {
    throw std::invalid_argument("PolicyConfig: step and iteration budgets must be >= 1");
  }
}

EpisodeResult run_episode(sim::World& world, const DecoderModel* decoder,
                          const sim::ControllerGains& gains, const sim::ControlTargets& targets,
                          const InferenceConfig& inference, const PolicyConfig& policy,
                          std::uint64_t seed, bool keep_log) {
  policy.validate();
  inference.validate();
  if (policy.alignment_enabled && decoder == nullptr) {
    throw std::invalid_argument("run_episode: alignment enabled but no decoder given");
  }

  EpisodeResult result;
  result.seed = seed;
  result.initial_tilt_deg = world.state().mu_true_deg;

  Rng slip_rng(derive_seed(seed, 3));
  std::uint64_t render_counter = 0;
  double last_mu_hat = 0.0;

  const auto infer = [&](int max_iters) {
    InferenceConfig cfg = inference;
    cfg.max_iters = max_iters;
    cfg.mu_init_deg = policy.warm_start ? last_mu_hat : 0.0;
    const TactileImage o_tac = world.render(derive_seed(seed, 1000 + render_counter++));
    // theta contributes a constant to F during perception; report it at 0.
    const BeliefState belief = infer_tilt(*decoder, o_tac, cfg, 0.0);
    last_mu_hat = belief.mu_deg;
    return belief;
  };

  const auto log_row = [&](int step, char active) {
    if (!keep_log) return;
    const sim::WorldState& st = world.state();
    result.log.push_back(EpisodeLogRow{step, st.mu_true_deg, st.phi_ee_deg, st.theta_deg(),
                                       st.insertion_depth_mm, active});
  };

  // Phase 1: align the freshly grasped peg before driving down.
  if (policy.alignment_enabled) {
    const BeliefState belief = infer(policy.initial_inference_max_iters);
    if (std::abs(belief.mu_deg) > policy.mu_action_threshold_deg) {
      sim::apply_alignment(world.state(), belief.mu_deg);
      ++result.alignments_performed;
    }
    log_row(0, 'A');
  }

  // Phase 2: force-controlled insertion with periodic belief refreshes.
  for (int step = 1; step <= policy.max_episode_steps; ++step) {
    bool aligned_this_tick = false;
    if (policy.alignment_enabled && step % policy.inference_period == 0) {
      const BeliefState belief = infer(policy.refresh_max_iters);
      const double theta_est = belief.mu_deg + world.state().phi_ee_deg;
      if (std::abs(theta_est) > policy.theta_switch_threshold_deg) {
        sim::apply_alignment(world.state(), belief.mu_deg);
        ++result.alignments_performed;
        aligned_this_tick = true;
      }
    }
    if (!aligned_this_tick) {
      world.control_step(gains, targets, world.params().dt);
      if (world.state().in_contact) {
        sim::slippage_event(world.state(), world.params(), slip_rng, sim::SlipKind::contact_jitter);
      }
    }
    log_row(step, aligned_this_tick ? 'A' : 'I');
    result.steps = step;
    if (world.success()) {
      result.success = true;
      break;
    }
  }

  result.final_theta_deg = world.state().theta_deg();
  return result;
}

Scenario scenario_preset(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  if (name == "cuboid") {
    s.peg = sim::peg_preset("cuboid");
    s.hole.clearance_mm = 0.08;
    s.peg.surface_noise = 0.15;
  } else if (name == "pulley") {
    s.peg = sim::peg_preset("pulley");
    s.hole.clearance_mm = 0.3;
    s.peg.surface_noise = 0.1;
  } else {
    throw std::invalid_argument("scenario_preset: unknown scenario '" + std::string(name) + "'");
  }
  // The campaign decoder trains on the slippage range, so the tilt input is
  // normalized by that range.
  s.train_options.tilt_scale_deg = 10.0;
  s.targets.position_mm = {s.hole.entry_y_mm, -s.hole.depth_mm};
  return s;
}

CampaignResult run_campaign(const Scenario& scenario, int n_episodes, int reposition_every,
                            std::uint64_t master_seed) {
  if (n_episodes < 1) {
    throw std::invalid_argument("run_campaign: n_episodes must be >= 1");
  }
  if (reposition_every < 1) {
    throw std::invalid_argument("run_campaign: reposition_every must be >= 1");
  }

  // Decoder: trained once per campaign from a straight-pose observation of
  // this peg (the alignment-off baseline never needs one).
  std::optional<DecoderModel> decoder;
  if (scenario.policy.alignment_enabled) {
    AugmentConfig train_cfg = scenario.decoder_train;
    train_cfg.rng_seed = derive_seed(master_seed, 12);
    const TactileImage o_init =
        sim::render_tactile(scenario.peg, 0.0, derive_seed(master_seed, 11));
    auto [model, report] = instant_train(o_init, train_cfg, scenario.decoder_epochs,
                                         derive_seed(master_seed, 13), scenario.train_options);
    (void)report;
    decoder.emplace(std::move(model));
  }

  CampaignResult result;
  result.episodes.reserve(static_cast<std::size_t>(n_episodes));
  for (int i = 0; i < n_episodes; ++i) {
    // Start-position block: re-randomized every reposition_every episodes.
    Rng block_rng(derive_seed(master_seed, 100 + static_cast<std::uint64_t>(i / reposition_every)));
    const double off_y = block_rng.uniform(-scenario.start_offset_range_mm,
                                           scenario.start_offset_range_mm);
    const double off_z = block_rng.uniform(-scenario.start_offset_range_mm,
                                           scenario.start_offset_range_mm);

    const std::uint64_t episode_seed = derive_seed(master_seed, 200 + static_cast<std::uint64_t>(i));
    sim::World world(scenario.peg, scenario.hole, scenario.world);
    world.state().position_mm = {scenario.hole.entry_y_mm + off_y,
                                 scenario.world.start_height_mm + off_z};

    // The grasp lands with a random tilt.
    Rng start_rng(derive_seed(episode_seed, 2));
    sim::slippage_event(world.state(), scenario.world, start_rng, sim::SlipKind::episode_start);

    EpisodeResult ep = run_episode(world, decoder ? &*decoder : nullptr, scenario.gains,
                                   scenario.targets, scenario.inference, scenario.policy,
                                   episode_seed);
    if (ep.success) ++result.successes;
    result.episodes.push_back(std::move(ep));
  }
  result.success_rate = static_cast<double>(result.successes) / static_cast<double>(n_episodes);
  return result;
}

}  // namespace tactaif
