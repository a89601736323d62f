#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "tactaif/rng.hpp"
#include "tactaif/sim/peg.hpp"

namespace tactaif::sim {

struct HoleSpec {
  double clearance_mm = 0.08;
  double depth_mm = 12.0;
  double entry_y_mm = 0.0;

  void validate() const {
    if (!(clearance_mm > 0.0)) throw std::invalid_argument("HoleSpec: clearance must be positive");
    if (!(depth_mm > 0.0)) throw std::invalid_argument("HoleSpec: depth must be positive");
  }
};

/// Parallel position/force control gains. `selection` is the diagonal of S
/// over the (y, z) axes; 1 = pure position control, 0 = pure force control.
struct ControllerGains {
  double kp_pos = 0.8;
  double kd_pos = 0.1;
  double kp_force = 0.5;
  double ki_force = 0.05;
  std::array<double, 2> selection = {1.0, 0.0};
  std::array<double, 2> residual_action = {0.0, 0.0};  // a_x, learned offline
};

struct ControlTargets {
  std::array<double, 2> position_mm = {0.0, -12.0};
  /// Desired reaction force (N); the z entry is the press force.
  std::array<double, 2> force_n = {0.0, 5.0};
};

struct WorldParams {
  double dt = 0.1;                 // control tick (s)
  double plant_tau = 1.0;          // first-order plant time constant (s)
  double max_step_mm = 2.0;        // per-tick motion clamp
  double contact_stiffness = 10.0;  // N/mm spring against surface and jams
  double lateral_wrench_gain = 2.0;
  double capture_tol_mm = 0.5;     // lateral window for entering the hole
  double start_height_mm = 10.0;   // nominal start height above the surface
  double slip_start_min_deg = -10.0;  // episode-start tilt draw
  double slip_start_max_deg = 10.0;
  double jitter_range_deg = 2.0;   // in-contact slip magnitude
  double jitter_wrench_threshold_n = 0.8;
  int jitter_cooldown_ticks = 25;
};

struct Wrench {
  double fy = 0.0;
  double fz = 0.0;
};

struct ControllerMemory {
  std::array<double, 2> force_integral = {0.0, 0.0};
  std::array<double, 2> prev_pos_error = {0.0, 0.0};
  bool has_prev = false;
};

/// Quasi-static world state. theta is derived, so the identity
/// theta = mu_true + phi_ee holds after every operation by construction.
struct WorldState {
  double mu_true_deg = 0.0;  // peg tilt relative to the end effector
  double phi_ee_deg = 0.0;   // commanded end-effector rotation from vertical
  std::array<double, 2> position_mm = {0.0, 10.0};  // (y, z); z > 0 above surface
  double insertion_depth_mm = 0.0;
  bool in_contact = false;
  Wrench wrench;
  ControllerMemory ctrl;
  int tick = 0;
  int last_jitter_tick = -1000000;

  double theta_deg() const { return mu_true_deg + phi_ee_deg; }
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Angular tolerance for a successful insertion:
/// atan(clearance / engagement length) with engagement length = peg width.
double success_tolerance_deg(const HoleSpec& hole, const PegSpec& peg);

/// True iff fully inserted and within the angular tolerance.
bool insertion_succeeded(const WorldState& state, const HoleSpec& hole, const PegSpec& peg);

/// Alignment action: rotate the end effector about the TCP so the believed
/// tilt is cancelled. phi_ee <- -mu_hat; the true peg tilt is untouched.
void apply_alignment(WorldState& state, double mu_hat_deg);

enum class SlipKind { episode_start, contact_jitter };

/// episode_start draws mu_true uniformly from the configured start range.
/// contact_jitter adds a uniform disturbance; requires contact, and only
/// fires when the lateral wrench exceeds the threshold (with a cooldown).
/// Returns true if the tilt changed.
bool slippage_event(WorldState& state, const WorldParams& params, Rng& rng, SlipKind kind);

/// Deterministic quasi-static peg-in-hole world with an Eq.-style parallel
/// position/force control step. One instance per episode.
class World {
 public:
  World(PegSpec peg, HoleSpec hole, WorldParams params);

  const PegSpec& peg() const { return peg_; }
  const HoleSpec& hole() const { return hole_; }
  const WorldParams& params() const { return params_; }
  WorldState& state() { return state_; }
  const WorldState& state() const { return state_; }

  double jam_threshold_deg() const { return success_tolerance_deg(hole_, peg_); }

  /// One control tick. Computes the command
  ///   cmd = S (kp_pos x_e + kd_pos xd_e) + a_x
  ///       + (I - S) (kp_force F_e + ki_force int F_e dt)
  /// over the translational (y, z) axes with F_e = wrench - target force,
  /// integrates a first-order plant response, resolves surface/hole contact
  /// and updates the wrench and insertion depth. Insertion depth can only
  /// grow while |theta| is inside the jam threshold. Returns the command.
  std::array<double, 2> control_step(const ControllerGains& gains, const ControlTargets& targets,
                                     double dt);

  /// Tactile observation of the current peg-in-gripper tilt (the alignment
  /// rotation phi_ee does not show on the sensor).
  TactileImage render(std::uint64_t noise_seed) const;

  bool success() const { return insertion_succeeded(state_, hole_, peg_); }

 private:
  PegSpec peg_;
  HoleSpec hole_;
  WorldParams params_;
  WorldState state_;
};

}  // namespace tactaif::sim
