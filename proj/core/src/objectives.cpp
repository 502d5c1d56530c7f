#include "frl/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "frl/spectra.hpp"

namespace frl {

namespace {

class MatrixRegression final : public Loss {
 public:
  MatrixRegression(Matrix d, double scale) : d_(std::move(d)), scale_(scale) {
    require_nonempty(d_);
    require_finite(d_);
    if (!(scale_ > 0.0)) throw std::invalid_argument("matrix regression: scale must be > 0");
  }

  double value(const Matrix& w) const override {
    require_same_shape(w, d_, "matrix regression");
    return scale_ * (w - d_).squaredNorm();
  }

  Matrix gradient(const Matrix& w) const override {
    require_same_shape(w, d_, "matrix regression");
    return 2.0 * scale_ * (w - d_);
  }

 private:
  Matrix d_;
  double scale_;
};

class WhitenedRegression final : public Loss {
 public:
  WhitenedRegression(Matrix sigma_yx, Matrix sigma_xx)
      : sigma_yx_(std::move(sigma_yx)), sigma_xx_(std::move(sigma_xx)) {
    require_nonempty(sigma_yx_);
    require_finite(sigma_yx_);
    require_nonempty(sigma_xx_);
    require_finite(sigma_xx_);
    if (sigma_xx_.rows() != sigma_xx_.cols()) {
      throw std::invalid_argument("whitened regression: sigma_xx must be square");
    }
    if ((sigma_xx_ - sigma_xx_.transpose()).norm() > 1e-9) {
      throw std::invalid_argument("whitened regression: sigma_xx not symmetric");
    }
    if (sigma_yx_.cols() != sigma_xx_.rows()) {
      throw std::invalid_argument("whitened regression: sigma_yx/sigma_xx shapes disagree");
    }
  }

  double value(const Matrix& w) const override {
    require_same_shape(w, sigma_yx_, "whitened regression");
    return 0.5 * (w * sigma_xx_).cwiseProduct(w).sum() - w.cwiseProduct(sigma_yx_).sum();
  }

  Matrix gradient(const Matrix& w) const override {
    require_same_shape(w, sigma_yx_, "whitened regression");
    return w * sigma_xx_ - sigma_yx_;
  }

 private:
  Matrix sigma_yx_;
  Matrix sigma_xx_;
};

class MaskedCompletion final : public Loss {
 public:
  MaskedCompletion(Matrix d, Matrix mask) : d_(std::move(d)), mask_(std::move(mask)) {
    require_nonempty(d_);
    require_finite(d_);
    require_same_shape(mask_, d_, "masked completion");
    for (Index i = 0; i < mask_.rows(); ++i) {
      for (Index j = 0; j < mask_.cols(); ++j) {
        if (mask_(i, j) != 0.0 && mask_(i, j) != 1.0) {
          throw std::invalid_argument("masked completion: mask entries must be 0 or 1");
        }
      }
    }
  }

  double value(const Matrix& w) const override {
    require_same_shape(w, d_, "masked completion");
    return 0.5 * mask_.cwiseProduct(w - d_).squaredNorm();
  }

  Matrix gradient(const Matrix& w) const override {
    require_same_shape(w, d_, "masked completion");
    return mask_.cwiseProduct(w - d_);
  }

 private:
  Matrix d_;
  Matrix mask_;
};

class AffineDistance final : public Loss {
 public:
  AffineDistance(std::vector<double> u, double c) : u_(std::move(u)), c_(c) {
    norm_sq_ = 0.0;
    for (double x : u_) norm_sq_ += x * x;
    if (u_.empty() || norm_sq_ == 0.0) {
      throw std::invalid_argument("affine distance: u must be non-zero");
    }
  }

  double value(const Matrix& w) const override {
    const double r = residual(w);
    return r * r / (2.0 * norm_sq_);
  }

  Matrix gradient(const Matrix& w) const override {
    const double r = residual(w);
    Matrix g(w.rows(), w.cols());
    // w is row-major, so flat index ties out with u's ordering.
    for (Index i = 0; i < g.size(); ++i) {
      g.data()[i] = r * u_[static_cast<std::size_t>(i)] / norm_sq_;
    }
    return g;
  }

 private:
  double residual(const Matrix& w) const {
    if (static_cast<std::size_t>(w.size()) != u_.size()) {
      throw std::invalid_argument("affine distance: w size does not match u");
    }
    double dot = 0.0;
    for (Index i = 0; i < w.size(); ++i) dot += u_[static_cast<std::size_t>(i)] * w.data()[i];
    return dot - c_;
  }

  std::vector<double> u_;
  double c_;
  double norm_sq_;
};

}  // namespace

LossPtr make_matrix_regression(Matrix d, double scale) {
  return std::make_shared<MatrixRegression>(std::move(d), scale);
}

LossPtr make_whitened_regression(Matrix sigma_yx, Matrix sigma_xx) {
  return std::make_shared<WhitenedRegression>(std::move(sigma_yx), std::move(sigma_xx));
}

LossPtr make_masked_completion(Matrix d, Matrix mask) {
  return std::make_shared<MaskedCompletion>(std::move(d), std::move(mask));
}

LossPtr make_affine_distance(std::vector<double> u, double c) {
  return std::make_shared<AffineDistance>(std::move(u), c);
}

FactorGradients factor_gradients(const Factorization& f, const Loss& loss, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("factor_gradients: lambda must be >= 0");
  const Matrix p = loss.gradient(product(f));
  FactorGradients g;
  g.grad_a = p * f.b + lambda * f.a;
  g.grad_b = p.transpose() * f.a + lambda * f.b;
  return g;
}

RegularizedPair evaluate_both_losses(const Factorization& f, const Loss& loss, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("evaluate_both_losses: lambda must be >= 0");
  const Matrix w = product(f);
  const double base = loss.value(w);
  RegularizedPair out;
  out.l2_value = base + 0.5 * lambda * (f.a.squaredNorm() + f.b.squaredNorm());
  out.nuclear_value = base + lambda * nuclear_norm(w);
  out.gap = out.l2_value - out.nuclear_value;
  return out;
}

}  // namespace frl
