#include "tactaif/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tactaif/csv.hpp"
#include "tactaif/nn/grad_check.hpp"
#include "tactaif/regressor.hpp"

namespace tactaif {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (version != 1) {
    throw ConfigError("config: unsupported version " + std::to_string(version));
  }
  try {
    inference.validate();
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (perception.pegs.empty()) {
    throw ConfigError("config: perception peg list is empty");
  }
  const auto& known = sim::peg_preset_names();
  for (const std::string& p : perception.pegs) {
    if (std::find(known.begin(), known.end(), p) == known.end()) {
      throw ConfigError("config: unknown peg '" + p + "'");
    }
  }
  if (perception.noise_profile != "low" && perception.noise_profile != "high") {
    throw ConfigError("config: noise_profile must be \"low\" or \"high\"");
  }
  if (perception.train_count < 1 || perception.test_count < 1 || perception.epochs < 1 ||
      perception.max_inference_iters < 1) {
    throw ConfigError("config: perception counts and budgets must be >= 1");
  }
  if (!(perception.train_range_deg > 0.0) || !(perception.test_range_deg > 0.0)) {
    throw ConfigError("config: perception tilt ranges must be positive");
  }
  if (dualpolicy.scenarios.empty()) {
    throw ConfigError("config: dual-policy scenario list is empty");
  }
  if (dualpolicy.episodes < 1 || dualpolicy.reposition_every < 1) {
    throw ConfigError("config: dual-policy episode counts must be >= 1");
  }
  if (!(decoder_train.learning_rate > 0.0) || !(baseline_train.learning_rate > 0.0)) {
    throw ConfigError("config: learning rates must be positive");
  }
  if (!(calibration.dt_min > 0.0) || !(calibration.dt_max > calibration.dt_min) ||
      calibration.points_per_decade < 1 || calibration.max_iters < 1 ||
      calibration.train_count < 1 || calibration.train_epochs < 1) {
    throw ConfigError("config: bad calibration sweep");
  }
}

namespace {

json inference_json(const InferenceConfig& c) {
  return json{{"precision_tac", c.precision_tac},
              {"prior_var_mu", c.prior_var_mu},
              {"prior_var_theta", c.prior_var_theta},
              {"step_dt", c.step_dt},
              {"max_iters", c.max_iters},
              {"mu_init_deg", c.mu_init_deg},
              {"convergence_eps_deg", c.convergence_eps_deg}};
}

InferenceConfig inference_from(const json& j) {
  InferenceConfig c;
  c.precision_tac = j.value("precision_tac", c.precision_tac);
  c.prior_var_mu = j.value("prior_var_mu", c.prior_var_mu);
  c.prior_var_theta = j.value("prior_var_theta", c.prior_var_theta);
  c.step_dt = j.value("step_dt", c.step_dt);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.mu_init_deg = j.value("mu_init_deg", c.mu_init_deg);
  c.convergence_eps_deg = j.value("convergence_eps_deg", c.convergence_eps_deg);
  return c;
}

json policy_json(const PolicyConfig& c) {
  return json{{"mu_action_threshold_deg", c.mu_action_threshold_deg},
              {"theta_switch_threshold_deg", c.theta_switch_threshold_deg},
              {"inference_period", c.inference_period},
              {"max_episode_steps", c.max_episode_steps},
              {"initial_inference_max_iters", c.initial_inference_max_iters},
              {"refresh_max_iters", c.refresh_max_iters},
              {"warm_start", c.warm_start}};
}

PolicyConfig policy_from(const json& j) {
  PolicyConfig c;
  c.mu_action_threshold_deg = j.value("mu_action_threshold_deg", c.mu_action_threshold_deg);
  c.theta_switch_threshold_deg =
      j.value("theta_switch_threshold_deg", c.theta_switch_threshold_deg);
  c.inference_period = j.value("inference_period", c.inference_period);
  c.max_episode_steps = j.value("max_episode_steps", c.max_episode_steps);
  c.initial_inference_max_iters =
      j.value("initial_inference_max_iters", c.initial_inference_max_iters);
  c.refresh_max_iters = j.value("refresh_max_iters", c.refresh_max_iters);
  c.warm_start = j.value("warm_start", c.warm_start);
  return c;
}

json train_json(const TrainOptions& c) {
  return json{{"learning_rate", c.learning_rate}, {"tilt_scale_deg", c.tilt_scale_deg}};
}

TrainOptions train_from(const json& j) {
  TrainOptions c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.tilt_scale_deg = j.value("tilt_scale_deg", c.tilt_scale_deg);
  return c;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  json j;
  j["version"] = version;
  j["master_seed"] = master_seed;
  j["inference"] = inference_json(inference);
  j["policy"] = policy_json(policy);
  j["decoder_train"] = train_json(decoder_train);
  j["baseline_train"] = train_json(baseline_train);
  j["perception"] = json{{"pegs", perception.pegs},
                         {"noise_profile", perception.noise_profile},
                         {"train_count", perception.train_count},
                         {"train_range_deg", perception.train_range_deg},
                         {"epochs", perception.epochs},
                         {"test_count", perception.test_count},
                         {"test_range_deg", perception.test_range_deg},
                         {"max_inference_iters", perception.max_inference_iters}};
  j["dualpolicy"] = json{{"scenarios", dualpolicy.scenarios},
                         {"episodes", dualpolicy.episodes},
                         {"reposition_every", dualpolicy.reposition_every},
                         {"with_alignment", dualpolicy.with_alignment},
                         {"without_alignment", dualpolicy.without_alignment},
                         {"write_episode_logs", dualpolicy.write_episode_logs}};
  j["calibration"] = json{{"dt_min", calibration.dt_min},
                          {"dt_max", calibration.dt_max},
                          {"points_per_decade", calibration.points_per_decade},
                          {"reference_peg", calibration.reference_peg},
                          {"max_iters", calibration.max_iters},
                          {"recovery_tol_deg", calibration.recovery_tol_deg},
                          {"train_count", calibration.train_count},
                          {"train_epochs", calibration.train_epochs}};
  return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  c.version = j.value("version", 1);
  c.master_seed = j.value("master_seed", c.master_seed);
  if (j.contains("inference")) c.inference = inference_from(j["inference"]);
  if (j.contains("policy")) c.policy = policy_from(j["policy"]);
  if (j.contains("decoder_train")) c.decoder_train = train_from(j["decoder_train"]);
  if (j.contains("baseline_train")) c.baseline_train = train_from(j["baseline_train"]);
  if (j.contains("perception")) {
    const json& p = j["perception"];
    c.perception.pegs = p.value("pegs", c.perception.pegs);
    c.perception.noise_profile = p.value("noise_profile", c.perception.noise_profile);
    c.perception.train_count = p.value("train_count", c.perception.train_count);
    c.perception.train_range_deg = p.value("train_range_deg", c.perception.train_range_deg);
    c.perception.epochs = p.value("epochs", c.perception.epochs);
    c.perception.test_count = p.value("test_count", c.perception.test_count);
    c.perception.test_range_deg = p.value("test_range_deg", c.perception.test_range_deg);
    c.perception.max_inference_iters =
        p.value("max_inference_iters", c.perception.max_inference_iters);
  }
  if (j.contains("dualpolicy")) {
    const json& p = j["dualpolicy"];
    c.dualpolicy.scenarios = p.value("scenarios", c.dualpolicy.scenarios);
    c.dualpolicy.episodes = p.value("episodes", c.dualpolicy.episodes);
    c.dualpolicy.reposition_every = p.value("reposition_every", c.dualpolicy.reposition_every);
    c.dualpolicy.with_alignment = p.value("with_alignment", c.dualpolicy.with_alignment);
    c.dualpolicy.without_alignment =
        p.value("without_alignment", c.dualpolicy.without_alignment);
    c.dualpolicy.write_episode_logs =
        p.value("write_episode_logs", c.dualpolicy.write_episode_logs);
  }
  if (j.contains("calibration")) {
    const json& p = j["calibration"];
    c.calibration.dt_min = p.value("dt_min", c.calibration.dt_min);
    c.calibration.dt_max = p.value("dt_max", c.calibration.dt_max);
    c.calibration.points_per_decade =
        p.value("points_per_decade", c.calibration.points_per_decade);
    c.calibration.reference_peg = p.value("reference_peg", c.calibration.reference_peg);
    c.calibration.max_iters = p.value("max_iters", c.calibration.max_iters);
    c.calibration.recovery_tol_deg = p.value("recovery_tol_deg", c.calibration.recovery_tol_deg);
    c.calibration.train_count = p.value("train_count", c.calibration.train_count);
    c.calibration.train_epochs = p.value("train_epochs", c.calibration.train_epochs);
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
  return from_json(read_text_file(path));
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json()); }

namespace {

void write_snapshot(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "config.snapshot", cfg.to_json());
}

}  // namespace

// ---------------------------------------------------------------------------
// Perception experiment (Table I analog)

PerceptionResult run_perception_experiment(const ExperimentConfig& cfg,
                                           const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  PerceptionResult result;
  result.config_hash = cfg.hash();

  struct Detail {
    std::string peg;
    int sample;
    double tilt_true, proposed, supervised;
  };
  std::vector<Detail> details;

  const std::uint64_t master = cfg.master_seed;
  for (std::size_t j = 0; j < cfg.perception.pegs.size(); ++j) {
    sim::PegSpec peg = sim::peg_preset(cfg.perception.pegs[j]);
    if (cfg.perception.noise_profile == "low") {
      peg.surface_noise = 0.0;
    }
    PerceptionRow row;
    row.peg = peg.name;
    row.noise = peg.surface_noise;

    const TactileImage o_train = sim::render_tactile(peg, 0.0, derive_seed(master, 10 + j));
    AugmentConfig train_cfg;
    train_cfg.count = cfg.perception.train_count;
    train_cfg.tilt_min_deg = -cfg.perception.train_range_deg;
    train_cfg.tilt_max_deg = cfg.perception.train_range_deg;
    train_cfg.rng_seed = derive_seed(master, 20 + j);

    try {
      auto [decoder, decoder_report] = instant_train(o_train, train_cfg, cfg.perception.epochs,
                                                     derive_seed(master, 30 + j),
                                                     cfg.decoder_train);
      (void)decoder_report;
      // The baseline trains on the identical dataset and epoch budget.
      const std::vector<LabeledSample> dataset = augment(o_train, train_cfg);
      auto [baseline, baseline_report] = train_tilt_regressor(
          dataset, cfg.perception.epochs, derive_seed(master, 40 + j), cfg.baseline_train);
      (void)baseline_report;

      // Test set from a straight-pose render at a different time step, i.e. a
      // disjoint noise seed; never reused in training.
      const TactileImage o_test = sim::render_tactile(peg, 0.0, derive_seed(master, 50 + j));
      AugmentConfig test_cfg;
      test_cfg.count = cfg.perception.test_count;
      test_cfg.tilt_min_deg = -cfg.perception.test_range_deg;
      test_cfg.tilt_max_deg = cfg.perception.test_range_deg;
      test_cfg.rng_seed = derive_seed(master, 60 + j);
      const std::vector<LabeledSample> test_set = augment(o_test, test_cfg);

      InferenceConfig inf = cfg.inference;
      inf.max_iters = cfg.perception.max_inference_iters;

      double abs_err_prop = 0.0, abs_err_sup = 0.0;
      for (std::size_t i = 0; i < test_set.size(); ++i) {
        const LabeledSample& sample = test_set[i];
        const double mu_hat = infer_tilt(decoder, sample.image, inf).mu_deg;
        const double pred = baseline.predict_tilt(sample.image);
        abs_err_prop += std::abs(mu_hat - sample.tilt_deg);
        abs_err_sup += std::abs(pred - sample.tilt_deg);
        details.push_back(Detail{peg.name, static_cast<int>(i), sample.tilt_deg, mu_hat, pred});
      }
      row.mae_proposed_deg = abs_err_prop / static_cast<double>(test_set.size());
      row.mae_supervised_deg = abs_err_sup / static_cast<double>(test_set.size());
    } catch (const TrainingDivergenceError&) {
      row.train_diverged = true;
      row.mae_proposed_deg = std::nan("");
      row.mae_supervised_deg = std::nan("");
    }
    result.rows.push_back(std::move(row));
  }

  if (out_dir) {
    write_snapshot(cfg, *out_dir);
    CsvWriter results(*out_dir / "results.csv", "peg,noise,supervised_mae_deg,proposed_mae_deg",
                      "config_hash=" + result.config_hash);
    for (const PerceptionRow& r : result.rows) {
      results.row({r.peg, CsvWriter::fmt(r.noise), CsvWriter::fmt(r.mae_supervised_deg),
                   CsvWriter::fmt(r.mae_proposed_deg)});
    }
    CsvWriter det(*out_dir / "details.csv",
                  "peg,sample,tilt_true_deg,proposed_mu_deg,supervised_pred_deg",
                  "config_hash=" + result.config_hash);
    for (const Detail& d : details) {
      det.row({d.peg, CsvWriter::fmt(d.sample), CsvWriter::fmt(d.tilt_true),
               CsvWriter::fmt(d.proposed), CsvWriter::fmt(d.supervised)});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Dual-policy experiment (Table II analog)

DualPolicyResult run_dualpolicy_experiment(const ExperimentConfig& cfg,
                                           const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  DualPolicyResult result;
  result.config_hash = cfg.hash();

  for (std::size_t j = 0; j < cfg.dualpolicy.scenarios.size(); ++j) {
    Scenario base = scenario_preset(cfg.dualpolicy.scenarios[j]);
    base.inference = cfg.inference;
    base.policy = cfg.policy;
    base.train_options = cfg.decoder_train;
    // Matched seeds: both variants replay the same initial conditions.
    const std::uint64_t campaign_seed = derive_seed(cfg.master_seed, 70 + j);

    std::vector<bool> variants;
    if (cfg.dualpolicy.with_alignment) variants.push_back(true);
    if (cfg.dualpolicy.without_alignment) variants.push_back(false);

    for (bool alignment : variants) {
      Scenario sc = base;
      sc.policy.alignment_enabled = alignment;
      CampaignResult campaign = run_campaign(sc, cfg.dualpolicy.episodes,
                                             cfg.dualpolicy.reposition_every, campaign_seed);
      DualPolicyRow row;
      row.scenario = sc.name;
      row.alignment = alignment;
      row.episodes = cfg.dualpolicy.episodes;
      row.successes = campaign.successes;
      row.success_rate = campaign.success_rate;
      result.rows.push_back(row);
      result.campaigns.emplace_back(sc.name + std::string(alignment ? "/with" : "/without"),
                                    std::move(campaign));
    }
  }

  if (out_dir) {
    write_snapshot(cfg, *out_dir);
    CsvWriter results(*out_dir / "results.csv",
                      "scenario,alignment,episodes,successes,success_rate",
                      "config_hash=" + result.config_hash);
    for (const DualPolicyRow& r : result.rows) {
      results.row({r.scenario, CsvWriter::fmt(r.alignment), CsvWriter::fmt(r.episodes),
                   CsvWriter::fmt(r.successes), CsvWriter::fmt(r.success_rate, 4)});
    }
    for (const auto& [key, campaign] : result.campaigns) {
      std::string fname = "episodes_" + key + ".csv";
      std::replace(fname.begin(), fname.end(), '/', '_');
      CsvWriter ep(*out_dir / fname, "episode,seed,initial_tilt_deg,alignments,steps,success",
                   "config_hash=" + result.config_hash);
      for (std::size_t i = 0; i < campaign.episodes.size(); ++i) {
        const EpisodeResult& e = campaign.episodes[i];
        ep.row({CsvWriter::fmt(static_cast<int>(i)), std::to_string(e.seed),
                CsvWriter::fmt(e.initial_tilt_deg), CsvWriter::fmt(e.alignments_performed),
                CsvWriter::fmt(e.steps), CsvWriter::fmt(e.success)});
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Step-size calibration

CalibrationResult calibrate_step_size(const ExperimentConfig& cfg,
                                      const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  CalibrationResult result;
  result.config_hash = cfg.hash();

  sim::PegSpec peg = sim::peg_preset(cfg.calibration.reference_peg);
  peg.surface_noise = 0.0;
  const TactileImage o_init = sim::render_tactile(peg, 0.0, derive_seed(cfg.master_seed, 90));
  AugmentConfig train_cfg{cfg.calibration.train_count, -20.0, 20.0,
                          derive_seed(cfg.master_seed, 91)};
  auto [decoder, report] = instant_train(o_init, train_cfg, cfg.calibration.train_epochs,
                                         derive_seed(cfg.master_seed, 92), cfg.decoder_train);
  (void)report;

  const double tilts[] = {-15.0, -10.0, -5.0, 5.0, 10.0, 15.0};

  // Largest-first log sweep; the first stable candidate wins.
  std::vector<double> sweep;
  for (int k = 0;; ++k) {
    const double dt =
        cfg.calibration.dt_max *
        std::pow(10.0, -static_cast<double>(k) / cfg.calibration.points_per_decade);
    if (dt < cfg.calibration.dt_min * (1.0 - 1e-12)) break;
    sweep.push_back(dt);
  }

  bool found = false;
  for (double dt : sweep) {
    CalibrationCandidate cand;
    cand.step_dt = dt;
    cand.stable = true;
    for (double t : tilts) {
      const TactileImage o_tac = rotate(o_init, t);
      InferenceConfig inf = cfg.inference;
      inf.step_dt = dt;
      inf.max_iters = cfg.calibration.max_iters;
      inf.record_trace = true;
      BeliefState belief;
      try {
        belief = infer_tilt(decoder, o_tac, inf);
      } catch (const DivergenceError&) {
        cand.stable = false;
        cand.max_recovery_error_deg = std::nan("");
        break;
      }
      cand.max_recovery_error_deg =
          std::max(cand.max_recovery_error_deg, std::abs(belief.mu_deg - t));
      // Monotone tail: F may rise in at most 1% of post-transient steps.
      const std::size_t n = belief.trace.size();
      const std::size_t tail_start = n / 10;
      std::size_t increases = 0, considered = 0;
      for (std::size_t i = tail_start + 1; i < n; ++i) {
        ++considered;
        if (belief.trace[i].second > belief.trace[i - 1].second * (1.0 + 1e-12)) ++increases;
      }
      const double frac =
          considered ? static_cast<double>(increases) / static_cast<double>(considered) : 0.0;
      cand.f_increase_fraction = std::max(cand.f_increase_fraction, frac);
      if (cand.max_recovery_error_deg > cfg.calibration.recovery_tol_deg || frac > 0.01) {
        cand.stable = false;
        break;
      }
    }
    result.candidates.push_back(cand);
    if (cand.stable) {
      result.chosen_dt = dt;
      found = true;
      break;
    }
  }
  if (!found) {
    throw CalibrationError("calibrate_step_size: no stable step size in sweep [" +
                           std::to_string(cfg.calibration.dt_min) + ", " +
                           std::to_string(cfg.calibration.dt_max) + "]");
  }

  if (out_dir) {
    write_snapshot(cfg, *out_dir);
    CsvWriter sweep_csv(*out_dir / "sweep.csv",
                        "step_dt,stable,max_recovery_error_deg,f_increase_fraction",
                        "config_hash=" + result.config_hash);
    for (const CalibrationCandidate& c : result.candidates) {
      sweep_csv.row({CsvWriter::fmt(c.step_dt, 10), CsvWriter::fmt(c.stable),
                     CsvWriter::fmt(c.max_recovery_error_deg),
                     CsvWriter::fmt(c.f_increase_fraction)});
    }
    json artifact{{"step_dt", result.chosen_dt}, {"config_hash", result.config_hash}};
    write_text_file(*out_dir / "chosen_dt.json", artifact.dump(2) + "\n");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gradient-check suite

GradCheckSummary run_grad_check_suite(int instances_per_kind, std::uint64_t master_seed) {
  GradCheckSummary summary;

  struct KindCase {
    std::string kind;
    std::vector<nn::LayerSpec> specs;
    std::vector<std::size_t> input_shape;
    nn::Mode mode;
  };
  using nn::Activation;
  using nn::LayerSpec;
  const std::vector<KindCase> kinds = {
      {"fully_connected", {LayerSpec::fully_connected(7, 5)}, {7}, nn::Mode::eval},
      {"conv2d", {LayerSpec::conv2d(2, 3, 3, 2, 1)}, {2, 7, 9}, nn::Mode::eval},
      {"transposed_conv2d",
       {LayerSpec::transposed_conv2d(3, 2, 4, 2, 1)},
       {3, 5, 6},
       nn::Mode::eval},
      {"dropout",
       {LayerSpec::fully_connected(6, 8), LayerSpec::dropout(0.3),
        LayerSpec::fully_connected(8, 4)},
       {6},
       nn::Mode::train},
      {"activation_relu",
       {LayerSpec::fully_connected(6, 6), LayerSpec::activation(Activation::relu)},
       {6},
       nn::Mode::eval},
      {"activation_sigmoid",
       {LayerSpec::fully_connected(6, 6), LayerSpec::activation(Activation::sigmoid)},
       {6},
       nn::Mode::eval},
      {"composite_decoder_stack",
       {LayerSpec::fully_connected(1, 8), LayerSpec::activation(Activation::relu),
        LayerSpec::fully_connected(8, 24), LayerSpec::activation(Activation::relu),
        LayerSpec::dropout(0.1), LayerSpec::reshape({2, 3, 4}),
        LayerSpec::transposed_conv2d(2, 2, 4, 2, 1), LayerSpec::activation(Activation::relu),
        LayerSpec::conv2d(2, 1, 3, 1, 1), LayerSpec::activation(Activation::sigmoid)},
       {1},
       nn::Mode::train},
  };

  for (std::size_t kind_idx = 0; kind_idx < kinds.size(); ++kind_idx) {
    const KindCase& kc = kinds[kind_idx];
    for (int inst = 0; inst < instances_per_kind; ++inst) {
      const std::uint64_t seed =
          derive_seed(master_seed, 1000 * (kind_idx + 1) + static_cast<std::uint64_t>(inst));
      nn::Network net(kc.specs, kc.input_shape, derive_seed(seed, 0));
      nn::Tensor input(kc.input_shape);
      Rng rng(derive_seed(seed, 1));
      for (double& x : input.v) x = rng.uniform(-1.0, 1.0);
      const double err = nn::grad_check(net, input, 1e-4, kc.mode, derive_seed(seed, 2));
      summary.cases.push_back(GradCheckCase{kc.kind, seed, err});
      summary.worst_layer_error = std::max(summary.worst_layer_error, err);
    }
  }

  // Decoder tilt derivative against central differences.
  for (int inst = 0; inst < instances_per_kind; ++inst) {
    const std::uint64_t seed = derive_seed(master_seed, 900 + static_cast<std::uint64_t>(inst));
    nn::Network net(default_decoder_spec(16, 8), {1}, derive_seed(seed, 0));
    const DecoderModel model(std::move(net), 16, 8, 20.0);
    Rng rng(derive_seed(seed, 1));
    const double mu = rng.uniform(-15.0, 15.0);
    const double h = 1e-3;
    const nn::Tensor analytic = model.tilt_derivative(mu);
    const TactileImage plus = model.predict(mu + h);
    const TactileImage minus = model.predict(mu - h);
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double numeric = (plus.pixels()[i] - minus.pixels()[i]) / (2.0 * h);
      const double denom = std::max(std::abs(analytic[i]), std::abs(numeric));
      if (denom <= 1e-6) continue;
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    summary.cases.push_back(GradCheckCase{"decoder_tilt_derivative", seed, worst});
    summary.worst_decoder_error = std::max(summary.worst_decoder_error, worst);
  }

  summary.passed = summary.worst_layer_error < 1e-4 && summary.worst_decoder_error < 1e-3;
  return summary;
}

}  // namespace tactaif
