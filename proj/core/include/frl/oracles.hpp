#pragma once

#include <cstddef>
#include <vector>

#include "frl/matrix.hpp"

namespace frl {

struct EquilibriumSpectrum {
  std::vector<double> input_singular_values;
  double lambda = 0.0;
  std::vector<double> output_singular_values;  // (s_i - lambda)_+
};

/// Stable equilibrium spectrum of the regularized two-layer linear network
/// with whitened inputs and enough hidden units: each singular value shrinks
/// by lambda and vanishes once lambda exceeds it. Requires positive, distinct
/// inputs and lambda > 0; throws "assumption violated" otherwise.
EquilibriumSpectrum two_layer_equilibrium(const std::vector<double>& s, double lambda);

/// Single-matrix counterpart: uniform shrink s_i / (1 + lambda), rank kept.
std::vector<double> single_matrix_equilibrium(const std::vector<double>& s, double lambda);

/// Global minimizer of scale ||W - D||^2 + lambda ||W||_*: singular-value
/// soft-thresholding of D at lambda / (2 scale).
Matrix svt_minimizer(const Matrix& d, double lambda, double scale);

/// L2 strength whose equilibria match AdamW(lambda_wd, epsilon) in the
/// small-weight regime: epsilon * lambda_wd under the (lambda/2)||W||^2
/// regularizer convention used throughout this library. Under the
/// lambda||W||^2 convention the same strength reads epsilon * lambda_wd / 2.
double adamw_l2_equivalent(double lambda_wd, double epsilon);

struct IndexWindow {
  std::size_t lo = 0;  // inclusive
  std::size_t hi = 0;  // exclusive
};

/// Least-squares slope of -log(series[k]) against k over [lo, hi).
/// Series must be strictly positive there; throws "cannot fit log" otherwise.
double fit_exponential_rate(const std::vector<double>& series, IndexWindow window);

}  // namespace frl
