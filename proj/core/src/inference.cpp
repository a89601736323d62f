#include "tactaif/inference.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace tactaif {

void InferenceConfig::validate() const {
  if (!(precision_tac >= 0.0)) {
    throw std::invalid_argument("InferenceConfig: precision_tac must be >= 0");
  }
  if (!(prior_var_mu > 0.0) || !(prior_var_theta > 0.0)) {
    throw std::invalid_argument("InferenceConfig: prior variances must be positive");
  }
  if (!(step_dt > 0.0)) {
    throw std::invalid_argument("InferenceConfig: step_dt must be positive");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("InferenceConfig: max_iters must be >= 1");
  }
  if (convergence_eps_deg < 0.0) {
    throw std::invalid_argument("InferenceConfig: convergence_eps_deg must be >= 0");
  }
}

namespace {

void require_dims(const DecoderModel& model, const TactileImage& o_tac) {
  if (o_tac.width() != model.width() || o_tac.height() != model.height()) {
    throw std::invalid_argument("inference: observation dimensions do not match the decoder");
  }
}

double prior_terms(double mu_deg, double theta_deg, const InferenceConfig& cfg) {
  return 0.5 * mu_deg * mu_deg / cfg.prior_var_mu +
         0.5 * theta_deg * theta_deg / cfg.prior_var_theta;
}

// Sum of squared prediction error between the observation and g(mu).
double residual_sse(const DecoderModel& model, double mu_deg, const TactileImage& o_tac) {
  const TactileImage g = model.predict(mu_deg);
  double sse = 0.0;
  for (std::size_t i = 0; i < o_tac.pixel_count(); ++i) {
    const double r = o_tac.pixels()[i] - g.pixels()[i];
    sse += r * r;
  }
  return sse;
}

struct StepEval {
  double mu_dot = 0.0;
  double free_energy = 0.0;  // at the evaluated mu
};

// One fused evaluation: g(mu) and dg/dmu from a single tangent pass.
StepEval eval_step(const DecoderModel& model, double mu_deg, const TactileImage& o_tac,
                   double theta_deg, const InferenceConfig& cfg) {
  const auto [g, dg] = model.predict_with_derivative(mu_deg);
  double sse = 0.0;
  double inner = 0.0;
  for (std::size_t i = 0; i < o_tac.pixel_count(); ++i) {
    const double r = o_tac.pixels()[i] - g.pixels()[i];
    sse += r * r;
    inner += dg.v[i] * r;
  }
  StepEval out;
  out.mu_dot = cfg.precision_tac * inner - mu_deg / cfg.prior_var_mu;
  out.free_energy = 0.5 * cfg.precision_tac * sse + prior_terms(mu_deg, theta_deg, cfg);
  return out;
}

}  // namespace

double free_energy(const DecoderModel& model, double mu_deg, const TactileImage& o_tac,
                   double theta_deg, const InferenceConfig& cfg) {
  cfg.validate();
  require_dims(model, o_tac);
  return 0.5 * cfg.precision_tac * residual_sse(model, mu_deg, o_tac) +
         prior_terms(mu_deg, theta_deg, cfg);
}

BeliefState update_belief(const DecoderModel& model, const BeliefState& belief,
                          const TactileImage& o_tac, const InferenceConfig& cfg,
                          double theta_deg) {
  cfg.validate();
  require_dims(model, o_tac);
  const StepEval eval = eval_step(model, belief.mu_deg, o_tac, theta_deg, cfg);
  if (!std::isfinite(eval.mu_dot)) {
    throw DivergenceError(cfg.step_dt, std::abs(eval.mu_dot));
  }
  BeliefState next = belief;
  if (cfg.record_trace) {
    next.trace.emplace_back(belief.mu_deg, eval.free_energy);
  }
  next.mu_deg = belief.mu_deg + cfg.step_dt * eval.mu_dot;
  next.iterations_run = belief.iterations_run + 1;
  next.free_energy = 0.5 * cfg.precision_tac * residual_sse(model, next.mu_deg, o_tac) +
                     prior_terms(next.mu_deg, theta_deg, cfg);
  return next;
}

BeliefState infer_tilt(const DecoderModel& model, const TactileImage& o_tac,
                       const InferenceConfig& cfg, double theta_deg) {
  cfg.validate();
  require_dims(model, o_tac);

  BeliefState belief;
  belief.mu_deg = cfg.mu_init_deg;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const StepEval eval = eval_step(model, belief.mu_deg, o_tac, theta_deg, cfg);
    if (!std::isfinite(eval.mu_dot)) {
      throw DivergenceError(cfg.step_dt, std::abs(eval.mu_dot));
    }
    if (cfg.record_trace) {
      belief.trace.emplace_back(belief.mu_deg, eval.free_energy);
    }
    const double delta = cfg.step_dt * eval.mu_dot;
    belief.mu_deg += delta;
    belief.iterations_run = iter + 1;
    if (cfg.convergence_eps_deg > 0.0 && std::abs(delta) < cfg.convergence_eps_deg) {
      break;
    }
  }
  belief.free_energy = 0.5 * cfg.precision_tac * residual_sse(model, belief.mu_deg, o_tac) +
                       prior_terms(belief.mu_deg, theta_deg, cfg);
  return belief;
}

void write_trace_csv(const BeliefState& belief, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_trace_csv: cannot open " + path.string());
  }
  out << "iteration,mu_deg,free_energy\n";
  char buf[96];
  for (std::size_t i = 0; i < belief.trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g", i, belief.trace[i].first,
                  belief.trace[i].second);
    out << buf << "\n";
  }
}

}  // namespace tactaif
