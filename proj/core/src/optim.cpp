#include "frl/optim.hpp"

#include <cmath>
#include <utility>

#include "frl/spectra.hpp"

namespace frl {

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::gd: return "gd";
    case OptimizerKind::momentum_wd: return "momentum_wd";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adamw: return "adamw";
  }
  return "gd";
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "gd") return OptimizerKind::gd;
  if (name == "momentum_wd") return OptimizerKind::momentum_wd;
  if (name == "adam") return OptimizerKind::adam;
  if (name == "adamw") return OptimizerKind::adamw;
  throw std::invalid_argument("unknown optimizer kind: " + name);
}

OptimizerState OptimizerState::for_params(const std::vector<Matrix>& params,
                                          const OptimizerConfig& config) {
  OptimizerState s;
  s.rng = CounterRng(config.seed);
  s.first_moment.reserve(params.size());
  s.second_moment.reserve(params.size());
  for (const Matrix& p : params) {
    s.first_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
    s.second_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
  return s;
}

namespace {

void check_shapes(const std::vector<Matrix>& params, const std::vector<Matrix>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("params/grads count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i], grads[i], "optimizer step");
  }
}

// Global-norm clip factor over the whole gradient set; 1 when disabled.
double clip_factor(const std::vector<Matrix>& grads, const OptimizerConfig& config) {
  double factor = 1.0;
  if (config.grad_clip) {
    double sq = 0.0;
    for (const Matrix& g : grads) sq += g.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > *config.grad_clip && norm > 0.0) factor = *config.grad_clip / norm;
  }
  for (const Matrix& g : grads) {
    if (!g.allFinite()) throw std::runtime_error("diverged");
  }
  if (!std::isfinite(factor)) throw std::runtime_error("diverged");
  return factor;
}

}  // namespace

void gd_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
             const OptimizerConfig& config) {
  check_shapes(params, grads);
  if (!(config.step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
  const double c = clip_factor(grads, config);
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= config.step_size * c * grads[i];
  }
}

void momentum_wd_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                      OptimizerState& state, const OptimizerConfig& config) {
  check_shapes(params, grads);
  if (!(config.step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
  if (!(config.momentum > 0.0 && config.momentum <= 1.0)) {
    throw std::invalid_argument("momentum must be in (0, 1]");
  }
  const double c = clip_factor(grads, config);
  const double mu = config.momentum;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix drive = c * grads[i];
    if (config.noise_sigma > 0.0) {
      drive += state.rng.gaussian_matrix(drive.rows(), drive.cols(), config.noise_sigma);
    }
    state.first_moment[i] = (1.0 - mu) * state.first_moment[i] + mu * drive;
    params[i] -= config.step_size *
                 (state.first_moment[i] + config.weight_decay * params[i]);
  }
  ++state.t;
}

void adamw_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                OptimizerState& state, const OptimizerConfig& config) {
  check_shapes(params, grads);
  if (!(config.step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    throw std::invalid_argument("beta1/beta2 must be in [0, 1)");
  }
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");

  const double c = clip_factor(grads, config);
  ++state.t;
  const double corr1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix g = c * grads[i];
    state.first_moment[i] = config.beta1 * state.first_moment[i] + (1.0 - config.beta1) * g;
    state.second_moment[i] =
        config.beta2 * state.second_moment[i] + (1.0 - config.beta2) * g.cwiseProduct(g);
    const Matrix ghat = state.first_moment[i] / corr1;
    const Matrix bhat = state.second_moment[i] / corr2;
    const Matrix denom = (bhat.array().sqrt() + config.epsilon).matrix();
    params[i] -= config.step_size *
                 (ghat.cwiseQuotient(denom) + config.weight_decay * params[i]);
  }
}

namespace {

struct StepPlan {
  double gradient_lambda = 0.0;  // lambda folded into factor gradients
  OptimizerConfig effective;     // config actually handed to the step rule
};

StepPlan plan_for(double lambda, const OptimizerConfig& config) {
  StepPlan plan;
  plan.effective = config;
  switch (config.kind) {
    case OptimizerKind::gd:
      plan.gradient_lambda = lambda;
      plan.effective.weight_decay = 0.0;
      break;
    case OptimizerKind::adam:
      // One Adam code path: L2 goes through the gradient, decay stays off.
      plan.gradient_lambda = lambda;
      plan.effective.weight_decay = 0.0;
      break;
    case OptimizerKind::momentum_wd:
    case OptimizerKind::adamw:
      plan.gradient_lambda = 0.0;
      plan.effective.weight_decay = lambda;
      break;
  }
  return plan;
}

void dispatch_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                   OptimizerState& state, const OptimizerConfig& effective) {
  switch (effective.kind) {
    case OptimizerKind::gd:
      gd_step(params, grads, effective);
      break;
    case OptimizerKind::momentum_wd:
      momentum_wd_step(params, grads, state, effective);
      break;
    case OptimizerKind::adam:
    case OptimizerKind::adamw:
      adamw_step(params, grads, state, effective);
      break;
  }
}

TraceRecord pair_record(long long step, const Factorization& f, const Loss& loss,
                        double lambda) {
  TraceRecord rec;
  rec.step = step;
  const Matrix w = product(f);
  rec.loss_value = loss.value(w);
  const SpectrumReport rep = spectrum_report(w, 0.95);
  const double half_sum = 0.5 * (f.a.squaredNorm() + f.b.squaredNorm());
  rec.l2_value = rec.loss_value + lambda * half_sum;
  rec.nuclear_value = rec.loss_value + lambda * rep.nuclear;
  rec.balance_gap_fro = balance_gap(f).norm();
  rec.reg_gap = std::abs(rep.nuclear - half_sum);
  rec.pseudo_rank = rep.pseudo_rank;
  rec.singular_values = rep.singular_values;
  return rec;
}

TraceRecord chain_record(long long step, const DeepChain& c, const Loss& loss,
                         double lambda) {
  TraceRecord rec;
  rec.step = step;
  const Matrix w = c.product();
  rec.loss_value = loss.value(w);
  const double depth = static_cast<double>(c.depth());
  double half_sum = 0.0;
  for (const Matrix& a : c.layers) half_sum += a.squaredNorm();
  const double power = schatten_power(w, 2.0 / depth);
  rec.l2_value = rec.loss_value + 0.5 * lambda * half_sum;
  rec.nuclear_value = rec.loss_value + 0.5 * lambda * depth * power;
  double eps = 0.0;
  for (std::size_t l = 0; l + 1 < c.layers.size(); ++l) {
    eps = std::max(eps, nuclear_norm(c.layers[l].transpose() * c.layers[l] -
                                     c.layers[l + 1] * c.layers[l + 1].transpose()));
  }
  rec.balance_gap_fro = eps;
  rec.reg_gap = std::abs(power - half_sum / depth);
  const SpectrumReport rep = spectrum_report(w, 0.95);
  rec.pseudo_rank = rep.pseudo_rank;
  rec.singular_values = rep.singular_values;
  return rec;
}

bool all_finite(const std::vector<Matrix>& params) {
  for (const Matrix& p : params) {
    if (!p.allFinite()) return false;
  }
  return true;
}

template <typename RecordFn, typename GradFn>
Trace run_loop(std::vector<Matrix> params, double lambda, const OptimizerConfig& config,
               long long steps, long long record_every, RecordFn&& record, GradFn&& grad) {
  if (steps < 0) throw std::invalid_argument("run_training: steps must be >= 0");
  if (record_every < 1) throw std::invalid_argument("run_training: record_every must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("run_training: lambda must be >= 0");

  const StepPlan plan = plan_for(lambda, config);
  OptimizerState state = OptimizerState::for_params(params, plan.effective);

  Trace trace;
  trace.config = config;
  trace.lambda = lambda;
  trace.records.push_back(record(0, params));

  for (long long k = 1; k <= steps; ++k) {
    try {
      const std::vector<Matrix> grads = grad(params, plan.gradient_lambda);
      dispatch_step(params, grads, state, plan.effective);
    } catch (const std::runtime_error&) {
      trace.diverged = true;
      trace.steps_run = k - 1;
      trace.final_params = params;
      throw DivergedError("diverged", trace);
    }
    if (!all_finite(params)) {
      trace.diverged = true;
      trace.steps_run = k;
      trace.final_params = params;
      throw DivergedError("diverged", trace);
    }
    if (k % record_every == 0 || k == steps) {
      try {
        trace.records.push_back(record(k, params));
      } catch (const std::invalid_argument&) {
        // the parameters are finite but their product already overflowed
        trace.diverged = true;
        trace.steps_run = k;
        trace.final_params = params;
        throw DivergedError("diverged", trace);
      }
    }
  }
  trace.steps_run = steps;
  trace.final_params = std::move(params);
  return trace;
}

}  // namespace

Trace run_training(Factorization f, const Loss& loss, double lambda,
                   const OptimizerConfig& config, long long steps, long long record_every) {
  std::vector<Matrix> params{f.a, f.b};
  auto record = [&](long long step, const std::vector<Matrix>& p) {
    return pair_record(step, Factorization(p[0], p[1]), loss, lambda);
  };
  auto grad = [&](const std::vector<Matrix>& p, double gl) {
    const FactorGradients g = factor_gradients(Factorization(p[0], p[1]), loss, gl);
    return std::vector<Matrix>{g.grad_a, g.grad_b};
  };
  return run_loop(std::move(params), lambda, config, steps, record_every, record, grad);
}

Trace run_training(DeepChain c, const Loss& loss, double lambda,
                   const OptimizerConfig& config, long long steps, long long record_every) {
  std::vector<Matrix> params = c.layers;
  auto record = [&](long long step, const std::vector<Matrix>& p) {
    return chain_record(step, DeepChain(p), loss, lambda);
  };
  auto grad = [&](const std::vector<Matrix>& p, double gl) {
    const std::size_t depth = p.size();
    // prefix[l] = A_0 ... A_{l-1}, suffix[l] = A_l ... A_{L-1}
    std::vector<Matrix> prefix(depth + 1), suffix(depth + 1);
    prefix[0] = Matrix::Identity(p.front().rows(), p.front().rows());
    for (std::size_t l = 0; l < depth; ++l) prefix[l + 1] = prefix[l] * p[l];
    suffix[depth] = Matrix::Identity(p.back().cols(), p.back().cols());
    for (std::size_t l = depth; l-- > 0;) suffix[l] = p[l] * suffix[l + 1];

    const Matrix dw = loss.gradient(prefix[depth]);
    std::vector<Matrix> grads(depth);
    for (std::size_t l = 0; l < depth; ++l) {
      grads[l] = prefix[l].transpose() * dw * suffix[l + 1].transpose() + gl * p[l];
    }
    return grads;
  };
  return run_loop(std::move(params), lambda, config, steps, record_every, record, grad);
}

}  // namespace frl
