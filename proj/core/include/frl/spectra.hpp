#pragma once

#include <vector>

#include "frl/matrix.hpp"

namespace frl {

// Singular values smaller than this fraction of the largest one are clamped
// to exactly zero, so directions that converged to zero count as rank drops
// instead of lingering as floating-point residue.
inline constexpr double kSingularValueClampRel = 1e-12;

struct SVDResult {
  Matrix u;               // m x k, orthonormal columns
  std::vector<double> s;  // k = min(m, n), non-increasing, clamped
  Matrix v;               // n x k, orthonormal columns

  Matrix reconstruct() const;
};

/// Thin SVD with a canonical sign convention (the largest-magnitude entry of
/// each left singular vector is non-negative). Deterministic for fixed input.
/// Throws "non-finite matrix" on bad input, "svd did not converge" if the
/// backend's sweep cap is exhausted.
SVDResult svd(const Matrix& m);

/// Sum of the p-th powers of the singular values; p = 1 is the nuclear norm.
double schatten_power(const Matrix& m, double p);

/// Nuclear norm, schatten_power(m, 1).
double nuclear_norm(const Matrix& m);

/// Fraction k/n of leading singular values needed to capture at least
/// `threshold` of the total singular-value sum. All-zero spectra map to 0.
/// Throws "invalid spectrum" if s is unsorted or has negative entries.
double pseudo_rank(const std::vector<double>& s, double threshold);

struct SpectrumReport {
  std::vector<double> singular_values;
  double nuclear = 0.0;
  double frobenius = 0.0;
  double pseudo_rank = 0.0;
  double threshold = 0.95;
};

SpectrumReport spectrum_report(const Matrix& m, double threshold = 0.95);

}  // namespace frl
