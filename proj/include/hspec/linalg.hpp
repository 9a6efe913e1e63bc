#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>

namespace hspec {

template <typename Scalar>
using SparseRows = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

template <typename Scalar>
struct LineFit {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar max_residual = 0;
  Scalar slope_stderr = 0;
};

// Ordinary least squares y ~ slope * x + intercept.
template <typename DerivedX, typename DerivedY>
LineFit<typename DerivedX::Scalar> fit_line(const Eigen::MatrixBase<DerivedX>& x,
                                            const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> design(n, 2);
  design.col(0) = x;
  design.col(1).setOnes();
  const Eigen::Matrix<Scalar, 2, 1> coef = design.colPivHouseholderQr().solve(y);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> residual = y - design * coef;

  LineFit<Scalar> fit;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  fit.max_residual = residual.cwiseAbs().maxCoeff();
  if (n > 2) {
    const Scalar centered = (x.array() - x.mean()).square().sum();
    if (centered > 0) fit.slope_stderr = std::sqrt(residual.squaredNorm() / Scalar(n - 2) / centered);
  }
  return fit;
}

/// Perron root of a nonnegative irreducible matrix.
///
/// Power iteration on M + I (aperiodic even when M is periodic) from the
/// all-ones vector; stops when the Collatz-Wielandt bracket
/// min (Ax)_i / x_i <= rho <= max (Ax)_i / x_i is narrower than tol * rho.
template <typename Scalar>
Scalar spectral_radius(const SparseRows<Scalar>& m, Scalar tol = Scalar(1e-12), int max_iter = 2'000'000) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vec x = Vec::Ones(m.rows());
  Vec y(m.rows());
  Scalar lo = 0;
  Scalar hi = 0;
  for (int it = 0; it < max_iter; ++it) {
    y.noalias() = m * x;
    y += x;
    lo = (y.array() / x.array()).minCoeff();
    hi = (y.array() / x.array()).maxCoeff();
    if (hi - lo <= tol * hi) break;
    x = y / y.maxCoeff();
  }
  return Scalar(0.5) * (lo + hi) - Scalar(1);
}

}  // namespace hspec
