#pragma once

#include <optional>
#include <vector>

#include "frl/matrix.hpp"

namespace frl {

// Factor pair (A, B) representing W = A B^T. A is m x r, B is n x r.
// Overcomplete pairs (r > min(m, n)) are allowed; has_bottleneck() reports
// whether the bottleneck assumption of the balanced construction holds.
struct Factorization {
  Matrix a;
  Matrix b;

  Factorization(Matrix a_in, Matrix b_in);

  Index rank_bound() const { return a.cols(); }
  bool has_bottleneck() const { return a.cols() <= a.rows() && a.cols() <= b.rows(); }
};

// Ordered factor list A_1 ... A_L with conformable inner dimensions, L >= 2.
struct DeepChain {
  std::vector<Matrix> layers;

  explicit DeepChain(std::vector<Matrix> layers_in);

  std::size_t depth() const { return layers.size(); }
  Matrix product() const;
};

/// A B^T.
Matrix product(const Factorization& f);

/// Balance gap Q = A^T A - B^T B (r x r, symmetric).
Matrix balance_gap(const Factorization& f);

/// Balanced factors A = U (sqrt(S); 0) O^T, B = V (sqrt(S); 0) O^T from the
/// SVD of w. Requires r <= min(rows, cols) and rank(w) <= r (rank judged at
/// the spectra clamp threshold); throws "rank exceeds bottleneck" otherwise.
/// When `rotation` is given it must be r x r orthogonal; default is identity.
Factorization balanced_factors_from(const Matrix& w, Index r,
                                    const std::optional<Matrix>& rotation = std::nullopt);

struct RegularizerGap {
  double gap = 0.0;    // | ||AB^T||_* - (||A||^2 + ||B||^2) / 2 |
  double bound = 0.0;  // sqrt(||Q||_*) (||A||_* + ||B||_*) / 2
};

/// The nuclear-vs-Frobenius gap together with its balance-norm bound.
/// The bound dominates the gap for every pair; callers may assert gap <= bound.
RegularizerGap regularizer_gap_with_bound(const Factorization& f);

struct ChainBalanceReport {
  double epsilon = 0.0;                  // max_l || A_l^T A_l - A_{l+1} A_{l+1}^T ||_*
  std::vector<double> per_factor_gaps;   // | ||prod A||_{2/L}^{2/L} - ||A_k||_F^2 |
  std::vector<double> per_factor_bounds; // r ||A_k||_*^{L-1} e^{2/L} L^{4/L} eps^{1/L}
  bool side_condition_holds = false;     // eps <= min_l ||A_l||_*^L / L^4
  // Set only when the side condition holds; true iff every gap <= its bound.
  std::optional<bool> bound_ok;
};

ChainBalanceReport chain_balance_and_bound(const DeepChain& c);

/// Depth-L balanced chain A_l = O_{l-1} S^{1/L} O_l^T reproducing w, the
/// chain analogue of balanced_factors_from. Same rank/bottleneck rules.
DeepChain balanced_chain_from(const Matrix& w, Index r, int depth);

}  // namespace frl
