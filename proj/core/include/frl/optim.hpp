#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frl/factorized.hpp"
#include "frl/matrix.hpp"
#include "frl/objectives.hpp"
#include "frl/rng.hpp"

namespace frl {

enum class OptimizerKind { gd, momentum_wd, adam, adamw };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

// All fields are stored regardless of kind so that runs are fully
// reproducible from the recorded configuration.
struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::gd;
  double step_size = 1e-2;    // eta
  double weight_decay = 0.0;  // lambda, decoupled for momentum_wd / adamw
  double momentum = 0.9;      // mu, momentum_wd only
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double noise_sigma = 0.0;   // gaussian gradient noise, momentum_wd only
  std::optional<double> grad_clip;  // global-norm clip, off by default
  std::uint64_t seed = 0;
};

struct OptimizerState {
  std::vector<Matrix> first_moment;   // momentum buffer H, or Adam G_t
  std::vector<Matrix> second_moment;  // Adam B_t
  long long t = 0;
  CounterRng rng{0};

  static OptimizerState for_params(const std::vector<Matrix>& params,
                                   const OptimizerConfig& config);
};

/// p <- p - eta g. Throws "diverged" on non-finite gradients (after clipping).
void gd_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
             const OptimizerConfig& config);

/// H <- (1 - mu) H + mu (g + sigma xi); p <- p - eta (H + lambda p).
/// The decay acts on the parameter directly, outside the momentum buffer.
void momentum_wd_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                      OptimizerState& state, const OptimizerConfig& config);

/// Adam moments with bias correction (t incremented first), then
/// p <- p - eta (Ghat / (sqrt(Bhat) + eps) + lambda p).
void adamw_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                OptimizerState& state, const OptimizerConfig& config);

// One row of per-step diagnostics. For factor pairs, balance_gap_fro is
// ||A^T A - B^T B||_F and the regularized values use lambda ||W||_*; for
// chains the same column carries eps = max_l ||A_l^T A_l - A_{l+1}A_{l+1}^T||_*
// and the nuclear term generalizes to (lambda L / 2) ||W||_{2/L}^{2/L}.
struct TraceRecord {
  long long step = 0;
  double loss_value = 0.0;
  double l2_value = 0.0;
  double nuclear_value = 0.0;
  double balance_gap_fro = 0.0;
  double reg_gap = 0.0;
  double pseudo_rank = 0.0;
  std::vector<double> singular_values;
};

struct Trace {
  std::vector<TraceRecord> records;
  OptimizerConfig config;
  double lambda = 0.0;
  long long steps_run = 0;
  bool diverged = false;
  std::vector<Matrix> final_params;  // parameter state when the run stopped
};

// Divergence aborts the run but keeps everything recorded so far.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(std::string what, Trace partial_trace)
      : std::runtime_error(std::move(what)), partial(std::move(partial_trace)) {}

  Trace partial;
};

/// Trains the factor pair for `steps` optimizer steps, recording diagnostics
/// at step 0, every `record_every` steps, and the final step. lambda is the
/// regularization strength; it enters the gradient for gd/adam and the
/// decoupled decay for momentum_wd/adamw. Deterministic given config.seed.
Trace run_training(Factorization f, const Loss& loss, double lambda,
                   const OptimizerConfig& config, long long steps, long long record_every);

/// Deep-chain variant; gradients are prefix^T dL/dW suffix^T per layer.
Trace run_training(DeepChain c, const Loss& loss, double lambda,
                   const OptimizerConfig& config, long long steps, long long record_every);

}  // namespace frl
