#pragma once

#include <memory>
#include <vector>

#include "frl/factorized.hpp"
#include "frl/matrix.hpp"

namespace frl {

// Differentiable loss L(W) with a closed-form gradient. Implementations are
// immutable after construction; value/gradient are pure.
class Loss {
 public:
  virtual ~Loss() = default;
  virtual double value(const Matrix& w) const = 0;
  virtual Matrix gradient(const Matrix& w) const = 0;
};

using LossPtr = std::shared_ptr<const Loss>;

/// scale * ||W - D||_F^2. scale = 1/2 is the canonical form whose regularized
/// equilibrium spectrum is (s_i - lambda)_+; scale = 1 shifts the shrinkage
/// threshold to lambda / 2.
LossPtr make_matrix_regression(Matrix d, double scale);

/// Quadratic with gradient W Sigma_XX - Sigma_YX, the drive term of the
/// two-layer flow. The data-dependent constant is dropped; the value is
/// tr(W Sigma_XX W^T) / 2 - tr(W Sigma_YX^T), which has the same gradient.
LossPtr make_whitened_regression(Matrix sigma_yx, Matrix sigma_xx);

/// ||mask o (W - D)||_F^2 / 2 over the observed entries; mask entries in {0,1}.
LossPtr make_masked_completion(Matrix d, Matrix mask);

/// Squared distance to the hyperplane {w : u^T w = c}, halved:
/// (u^T w - c)^2 / (2 ||u||^2). W is read as a flat row-major vector.
LossPtr make_affine_distance(std::vector<double> u, double c);

struct FactorGradients {
  Matrix grad_a;  // dL/dW |_{W=AB^T} B + lambda A
  Matrix grad_b;  // (dL/dW)^T A + lambda B
};

FactorGradients factor_gradients(const Factorization& f, const Loss& loss, double lambda);

struct RegularizedPair {
  double l2_value = 0.0;       // L(AB^T) + lambda (||A||^2 + ||B||^2) / 2
  double nuclear_value = 0.0;  // L(AB^T) + lambda ||AB^T||_*
  double gap = 0.0;            // l2_value - nuclear_value, >= 0 up to rounding
};

RegularizedPair evaluate_both_losses(const Factorization& f, const Loss& loss, double lambda);

}  // namespace frl
