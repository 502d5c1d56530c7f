#include "frl/spectra.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace frl {

Matrix SVDResult::reconstruct() const {
  Eigen::VectorXd sv = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Index>(s.size()));
  return u * sv.asDiagonal() * v.transpose();
}

namespace {

// Flip paired singular-vector signs so the largest-magnitude entry of each
// u-column is non-negative; u s v^T is unchanged.
void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

}  // namespace

SVDResult svd(const Matrix& m) {
  require_nonempty(m);
  require_finite(m);

  SVDResult out;
  Eigen::VectorXd sv;
  // Jacobi for small problems, divide-and-conquer above its sweet spot.
  if (m.rows() <= 32 && m.cols() <= 32) {
    Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success) throw std::runtime_error("svd did not converge");
    out.u = solver.matrixU();
    out.v = solver.matrixV();
    sv = solver.singularValues();
  } else {
    Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success) throw std::runtime_error("svd did not converge");
    out.u = solver.matrixU();
    out.v = solver.matrixV();
    sv = solver.singularValues();
  }
  canonicalize_signs(out.u, out.v);

  out.s.assign(sv.data(), sv.data() + sv.size());
  if (!out.s.empty()) {
    const double clamp = kSingularValueClampRel * out.s.front();
    for (double& x : out.s) {
      if (x < clamp) x = 0.0;
    }
  }
  return out;
}

double schatten_power(const Matrix& m, double p) {
  if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("schatten_power: p must be in (0, 2]");
  const SVDResult d = svd(m);
  double sum = 0.0;
  for (double x : d.s) {
    if (x > 0.0) sum += std::pow(x, p);
  }
  return sum;
}

double nuclear_norm(const Matrix& m) { return schatten_power(m, 1.0); }

double pseudo_rank(const std::vector<double>& s, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("pseudo_rank: threshold must be in (0, 1]");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0.0 || !std::isfinite(s[i])) throw std::invalid_argument("invalid spectrum");
    if (i > 0 && s[i] > s[i - 1]) throw std::invalid_argument("invalid spectrum");
  }
  if (s.empty()) throw std::invalid_argument("invalid spectrum");

  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  if (total == 0.0) return 0.0;

  double cum = 0.0;
  const auto n = static_cast<double>(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    cum += s[k];
    if (cum / total >= threshold) return static_cast<double>(k + 1) / n;
  }
  return 1.0;  // rounding fallback; the full sum always qualifies
}

SpectrumReport spectrum_report(const Matrix& m, double threshold) {
  SpectrumReport r;
  r.threshold = threshold;
  r.singular_values = svd(m).s;
  double sum = 0.0, sumsq = 0.0;
  for (double x : r.singular_values) {
    sum += x;
    sumsq += x * x;
  }
  r.nuclear = sum;
  r.frobenius = std::sqrt(sumsq);
  r.pseudo_rank = pseudo_rank(r.singular_values, threshold);
  return r;
}

}  // namespace frl
