#include "frl/factorized.hpp"

#include <cmath>
#include <stdexcept>

#include "frl/spectra.hpp"

namespace frl {

Factorization::Factorization(Matrix a_in, Matrix b_in) : a(std::move(a_in)), b(std::move(b_in)) {
  require_nonempty(a);
  require_nonempty(b);
  if (a.cols() != b.cols()) throw std::invalid_argument("factorization: a.cols != b.cols");
  require_finite(a);
  require_finite(b);
}

DeepChain::DeepChain(std::vector<Matrix> layers_in) : layers(std::move(layers_in)) {
  if (layers.size() < 2) throw std::invalid_argument("deep chain requires at least 2 layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    require_nonempty(layers[l]);
    require_finite(layers[l]);
    if (l + 1 < layers.size() && layers[l].cols() != layers[l + 1].rows()) {
      throw std::invalid_argument("deep chain: inner dimensions not conformable");
    }
  }
}

Matrix DeepChain::product() const {
  Matrix w = layers.front();
  for (std::size_t l = 1; l < layers.size(); ++l) w = w * layers[l];
  return w;
}

Matrix product(const Factorization& f) { return f.a * f.b.transpose(); }

Matrix balance_gap(const Factorization& f) {
  return f.a.transpose() * f.a - f.b.transpose() * f.b;
}

Factorization balanced_factors_from(const Matrix& w, Index r,
                                    const std::optional<Matrix>& rotation) {
  require_nonempty(w);
  require_finite(w);
  if (r <= 0 || r > std::min(w.rows(), w.cols())) {
    throw std::invalid_argument("balanced_factors_from: r out of range");
  }
  if (rotation) {
    if (rotation->rows() != r || rotation->cols() != r) {
      throw std::invalid_argument("balanced_factors_from: rotation must be r x r");
    }
    const double dev = (rotation->transpose() * (*rotation) - Matrix::Identity(r, r)).norm();
    if (dev > 1e-9 * static_cast<double>(r)) {
      throw std::invalid_argument("balanced_factors_from: rotation not orthogonal");
    }
  }

  const SVDResult d = svd(w);
  for (std::size_t i = static_cast<std::size_t>(r); i < d.s.size(); ++i) {
    if (d.s[i] > 0.0) throw std::invalid_argument("rank exceeds bottleneck");
  }

  Eigen::VectorXd root(r);
  for (Index i = 0; i < r; ++i) root(i) = std::sqrt(d.s[static_cast<std::size_t>(i)]);

  Matrix a = d.u.leftCols(r) * root.asDiagonal();
  Matrix b = d.v.leftCols(r) * root.asDiagonal();
  if (rotation) {
    a = a * rotation->transpose();
    b = b * rotation->transpose();
  }
  return Factorization(std::move(a), std::move(b));
}

RegularizerGap regularizer_gap_with_bound(const Factorization& f) {
  const Matrix w = product(f);
  const double nuclear = nuclear_norm(w);
  const double half_sum = 0.5 * (f.a.squaredNorm() + f.b.squaredNorm());

  // ||Q||_* of the symmetric gap equals the sum of |eigenvalues|; the SVD
  // path computes the same thing and keeps one code path.
  const double q_nuclear = nuclear_norm(balance_gap(f));

  RegularizerGap out;
  out.gap = std::abs(nuclear - half_sum);
  out.bound = std::sqrt(q_nuclear) * 0.5 * (nuclear_norm(f.a) + nuclear_norm(f.b));
  return out;
}

ChainBalanceReport chain_balance_and_bound(const DeepChain& c) {
  const std::size_t depth = c.depth();
  const double dl = static_cast<double>(depth);

  ChainBalanceReport rep;
  for (std::size_t l = 0; l + 1 < depth; ++l) {
    const Matrix q = c.layers[l].transpose() * c.layers[l] -
                     c.layers[l + 1] * c.layers[l + 1].transpose();
    rep.epsilon = std::max(rep.epsilon, nuclear_norm(q));
  }

  const double product_power = schatten_power(c.product(), 2.0 / dl);

  // r in the bound is the largest rank any factor can have.
  Index r = std::numeric_limits<Index>::max();
  double min_nuclear = std::numeric_limits<double>::infinity();
  for (const Matrix& a : c.layers) {
    r = std::min(r, std::min(a.rows(), a.cols()));
    min_nuclear = std::min(min_nuclear, nuclear_norm(a));
  }
  rep.side_condition_holds = rep.epsilon <= std::pow(min_nuclear, dl) / std::pow(dl, 4.0);

  rep.per_factor_gaps.reserve(depth);
  rep.per_factor_bounds.reserve(depth);
  for (const Matrix& a : c.layers) {
    rep.per_factor_gaps.push_back(std::abs(product_power - a.squaredNorm()));
    const double bound = static_cast<double>(r) * std::pow(nuclear_norm(a), dl - 1.0) *
                         std::exp(2.0 / dl) * std::pow(dl, 4.0 / dl) *
                         std::pow(rep.epsilon, 1.0 / dl);
    rep.per_factor_bounds.push_back(bound);
  }

  if (rep.side_condition_holds) {
    bool ok = true;
    for (std::size_t k = 0; k < depth; ++k) {
      ok = ok && rep.per_factor_gaps[k] <= rep.per_factor_bounds[k];
    }
    rep.bound_ok = ok;
  }
  return rep;
}

DeepChain balanced_chain_from(const Matrix& w, Index r, int depth) {
  if (depth < 2) throw std::invalid_argument("balanced_chain_from: depth must be >= 2");
  require_nonempty(w);
  require_finite(w);
  if (r <= 0 || r > std::min(w.rows(), w.cols())) {
    throw std::invalid_argument("balanced_chain_from: r out of range");
  }

  const SVDResult d = svd(w);
  for (std::size_t i = static_cast<std::size_t>(r); i < d.s.size(); ++i) {
    if (d.s[i] > 0.0) throw std::invalid_argument("rank exceeds bottleneck");
  }

  Eigen::VectorXd root(r);
  for (Index i = 0; i < r; ++i) {
    root(i) = std::pow(d.s[static_cast<std::size_t>(i)], 1.0 / static_cast<double>(depth));
  }

  std::vector<Matrix> layers;
  layers.reserve(static_cast<std::size_t>(depth));
  layers.push_back(d.u.leftCols(r) * root.asDiagonal());
  for (int l = 1; l + 1 < depth; ++l) {
    layers.push_back(Matrix(root.asDiagonal()));
  }
  layers.push_back(root.asDiagonal() * d.v.leftCols(r).transpose());
  return DeepChain(std::move(layers));
}

}  // namespace frl
