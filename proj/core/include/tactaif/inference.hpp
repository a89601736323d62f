#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tactaif/decoder.hpp"
#include "tactaif/image.hpp"

namespace tactaif {

/// Largest stable integration step found by the shipped calibration sweep
/// (`calibrate-dt`) against the default decoder on the noiseless reference
/// footprint. Re-run the sweep after changing the decoder or image scale.
inline constexpr double kCalibratedStepDt = 3.0e-5;

struct InferenceConfig {
  double precision_tac = 2.0e4;   // observation precision (inverse variance)
  double prior_var_mu = 1.0e-2;   // Gaussian prior variance on the tilt belief
  double prior_var_theta = 1.0;   // Gaussian prior variance on the relative angle
  double step_dt = kCalibratedStepDt;
  int max_iters = 500;
  double mu_init_deg = 0.0;
  /// Early exit once the per-step belief change |dt * mu_dot| falls below
  /// this (degrees). 0 disables the exit; results may shift by at most 1e-2
  /// degrees versus running the full budget.
  double convergence_eps_deg = 1e-3;
  bool record_trace = false;

  void validate() const;
};

struct BeliefState {
  double mu_deg = 0.0;
  double free_energy = 0.0;
  int iterations_run = 0;
  /// (mu, F) at the start of each applied update; enabled by record_trace.
  std::vector<std::pair<double, double>> trace;
};

/// The belief update blew up (non-finite gradient).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double step_dt, double mu_dot_magnitude)
      : std::runtime_error("belief update diverged: step_dt " + std::to_string(step_dt) +
                           ", |mu_dot| " + std::to_string(mu_dot_magnitude)),
        step_dt_(step_dt),
        mu_dot_magnitude_(mu_dot_magnitude) {}
  double step_dt() const { return step_dt_; }
  double mu_dot_magnitude() const { return mu_dot_magnitude_; }

 private:
  double step_dt_;
  double mu_dot_magnitude_;
};

/// F = 1/2 * precision * sum((o - g(mu))^2) + mu^2/(2 sigma_mu^2)
///   + theta^2/(2 sigma_theta^2), additive constant dropped.
double free_energy(const DecoderModel& model, double mu_deg, const TactileImage& o_tac,
                   double theta_deg, const InferenceConfig& cfg);

/// One gradient step on F:
///   mu_dot = precision * <dg/dmu, o - g(mu)> - mu / sigma_mu^2
///   mu'    = mu + dt * mu_dot
/// Returns the advanced belief with F evaluated at mu'. theta only shifts
/// the reported F by a constant; it never enters the mu gradient.
BeliefState update_belief(const DecoderModel& model, const BeliefState& belief,
                          const TactileImage& o_tac, const InferenceConfig& cfg,
                          double theta_deg = 0.0);

/// Perceptual inference: iterates update_belief from cfg.mu_init_deg until
/// max_iters or convergence.
BeliefState infer_tilt(const DecoderModel& model, const TactileImage& o_tac,
                       const InferenceConfig& cfg, double theta_deg = 0.0);

/// Debug dump: CSV rows `iteration,mu_deg,free_energy`.
void write_trace_csv(const BeliefState& belief, const std::filesystem::path& path);

}  // namespace tactaif
