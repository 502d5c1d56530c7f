#include "frl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "frl/spectra.hpp"

namespace frl {

EquilibriumSpectrum two_layer_equilibrium(const std::vector<double>& s, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("assumption violated");
  if (s.empty()) throw std::invalid_argument("assumption violated");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) throw std::invalid_argument("assumption violated");
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s[i] == s[j]) throw std::invalid_argument("assumption violated");
    }
  }

  EquilibriumSpectrum out;
  out.input_singular_values = s;
  out.lambda = lambda;
  out.output_singular_values.reserve(s.size());
  for (double x : s) out.output_singular_values.push_back(std::max(x - lambda, 0.0));
  return out;
}

std::vector<double> single_matrix_equilibrium(const std::vector<double>& s, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  std::vector<double> out;
  out.reserve(s.size());
  for (double x : s) out.push_back(x / (1.0 + lambda));
  return out;
}

Matrix svt_minimizer(const Matrix& d, double lambda, double scale) {
  if (lambda < 0.0) throw std::invalid_argument("svt_minimizer: lambda must be >= 0");
  if (!(scale > 0.0)) throw std::invalid_argument("svt_minimizer: scale must be > 0");
  const SVDResult dec = svd(d);
  const double threshold = lambda / (2.0 * scale);
  Eigen::VectorXd s(static_cast<Index>(dec.s.size()));
  for (std::size_t i = 0; i < dec.s.size(); ++i) {
    s(static_cast<Index>(i)) = std::max(dec.s[i] - threshold, 0.0);
  }
  return dec.u * s.asDiagonal() * dec.v.transpose();
}

double adamw_l2_equivalent(double lambda_wd, double epsilon) {
  if (lambda_wd < 0.0 || epsilon < 0.0) {
    throw std::invalid_argument("adamw_l2_equivalent: inputs must be >= 0");
  }
  return epsilon * lambda_wd;
}

double fit_exponential_rate(const std::vector<double>& series, IndexWindow window) {
  if (window.hi > series.size() || window.lo >= window.hi || window.hi - window.lo < 3) {
    throw std::invalid_argument("fit_exponential_rate: window must cover >= 3 samples");
  }
  const std::size_t n = window.hi - window.lo;
  double k_mean = 0.0, y_mean = 0.0;
  for (std::size_t k = window.lo; k < window.hi; ++k) {
    if (!(series[k] > 0.0)) throw std::invalid_argument("cannot fit log");
    k_mean += static_cast<double>(k);
    y_mean += -std::log(series[k]);
  }
  k_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double num = 0.0, den = 0.0;
  for (std::size_t k = window.lo; k < window.hi; ++k) {
    const double dk = static_cast<double>(k) - k_mean;
    num += dk * (-std::log(series[k]) - y_mean);
    den += dk * dk;
  }
  return num / den;
}

}  // namespace frl
