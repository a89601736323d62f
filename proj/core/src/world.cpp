#include "tactaif/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tactaif::sim {

double success_tolerance_deg(const HoleSpec& hole, const PegSpec& peg) {
  return std::atan(hole.clearance_mm / peg.width_mm) * 180.0 / std::numbers::pi;
}

bool insertion_succeeded(const WorldState& state, const HoleSpec& hole, const PegSpec& peg) {
  return state.insertion_depth_mm >= hole.depth_mm - 1e-9 &&
         std::abs(state.theta_deg()) <= success_tolerance_deg(hole, peg);
}

void apply_alignment(WorldState& state, double mu_hat_deg) {
  state.phi_ee_deg = -mu_hat_deg;
}

bool slippage_event(WorldState& state, const WorldParams& params, Rng& rng, SlipKind kind) {
  switch (kind) {
    case SlipKind::episode_start: {
      const double tilt = rng.uniform(params.slip_start_min_deg, params.slip_start_max_deg);
      const bool changed = tilt != state.mu_true_deg;
      state.mu_true_deg = tilt;
      return changed;
    }
    case SlipKind::contact_jitter: {
      if (!state.in_contact) {
        throw UsageError("slippage_event: contact_jitter requires contact");
      }
      if (std::abs(state.wrench.fy) <= params.jitter_wrench_threshold_n) {
        return false;
      }
      if (state.tick - state.last_jitter_tick < params.jitter_cooldown_ticks) {
        return false;
      }
      const double delta = rng.uniform(-params.jitter_range_deg, params.jitter_range_deg);
      state.mu_true_deg += delta;
      state.last_jitter_tick = state.tick;
      return delta != 0.0;
    }
  }
  throw UsageError("slippage_event: unknown kind");
}

World::World(PegSpec peg, HoleSpec hole, WorldParams params)
    : peg_(std::move(peg)), hole_(hole), params_(params) {
  hole_.validate();
  state_.position_mm = {hole_.entry_y_mm, params_.start_height_mm};
}

std::array<double, 2> World::control_step(const ControllerGains& gains,
                                          const ControlTargets& targets, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("control_step: dt must be positive");
  }
  WorldState& st = state_;

  std::array<double, 2> x_e{}, xd_e{}, f_e{};
  const std::array<double, 2> wrench{st.wrench.fy, st.wrench.fz};
  for (int i = 0; i < 2; ++i) {
    x_e[i] = targets.position_mm[i] - st.position_mm[i];
    xd_e[i] = st.ctrl.has_prev ? (x_e[i] - st.ctrl.prev_pos_error[i]) / dt : 0.0;
    f_e[i] = wrench[i] - targets.force_n[i];
    st.ctrl.force_integral[i] += f_e[i] * dt;
  }

  std::array<double, 2> cmd{};
  for (int i = 0; i < 2; ++i) {
    const double s = gains.selection[i];
    cmd[i] = s * (gains.kp_pos * x_e[i] + gains.kd_pos * xd_e[i]) + gains.residual_action[i] +
             (1.0 - s) * (gains.kp_force * f_e[i] + gains.ki_force * st.ctrl.force_integral[i]);
  }
  st.ctrl.prev_pos_error = x_e;
  st.ctrl.has_prev = true;

  // First-order plant response toward the commanded correction, rate-limited.
  const double alpha = 1.0 - std::exp(-dt / params_.plant_tau);
  const double step_y = std::clamp(alpha * cmd[0], -params_.max_step_mm, params_.max_step_mm);
  const double step_z = std::clamp(alpha * cmd[1], -params_.max_step_mm, params_.max_step_mm);
  const double y_new = st.position_mm[0] + step_y;
  const double z_attempt = st.position_mm[1] + step_z;

  // Vertical contact resolution. The peg can only descend past the surface
  // when laterally captured by the hole and inside the jam threshold; a
  // partially inserted peg that tilts out of tolerance is stuck at its
  // current depth.
  const bool aligned = std::abs(y_new - hole_.entry_y_mm) <= params_.capture_tol_mm;
  const bool straight = std::abs(st.theta_deg()) <= jam_threshold_deg();
  double floor_z = 0.0;
  if (aligned && straight) {
    floor_z = -hole_.depth_mm;
  } else if (st.insertion_depth_mm > 0.0) {
    floor_z = -st.insertion_depth_mm;
  }
  const double z_new = std::max(z_attempt, floor_z);
  const double penetration = std::max(floor_z - z_attempt, 0.0);

  st.position_mm = {y_new, z_new};
  st.insertion_depth_mm = std::clamp(-z_new, 0.0, hole_.depth_mm);
  st.wrench.fz = params_.contact_stiffness * penetration;
  st.wrench.fy = params_.lateral_wrench_gain * st.wrench.fz *
                 std::sin(st.theta_deg() * std::numbers::pi / 180.0);
  st.in_contact = penetration > 0.0 || st.insertion_depth_mm > 0.0;
  st.tick += 1;
  return cmd;
}

TactileImage World::render(std::uint64_t noise_seed) const {
  return render_tactile(peg_, state_.mu_true_deg, noise_seed);
}

}  // namespace tactaif::sim
