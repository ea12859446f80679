#include "cgmom/linalg.hpp"

#include <Eigen/SVD>

namespace cgmom {

SvdSpectrum svd_spectrum(const Matrix& a) {
  if (a.size() == 0) {
    throw std::invalid_argument("svd_spectrum: empty matrix");
  }
  Eigen::BDCSVD<Matrix> svd(a);
  return SvdSpectrum{svd.singularValues()};
}

Vector least_squares_solve(const Matrix& a, const Vector& y) {
  if (a.size() == 0) {
    throw std::invalid_argument("least_squares_solve: empty matrix");
  }
  if (y.size() != a.rows()) {
    throw std::invalid_argument("least_squares_solve: rhs length does not match rows");
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cut = kRankTolFactor * (sigma.size() ? sigma(0) : 0.0);
  Vector coeffs = svd.matrixU().transpose() * y;
  for (Index i = 0; i < sigma.size(); ++i) {
    coeffs(i) = sigma(i) > cut ? coeffs(i) / sigma(i) : 0.0;
  }
  return svd.matrixV() * coeffs;
}

Matrix orthonormal_range_basis(const Matrix& m) {
  if (m.size() == 0) {
    throw std::invalid_argument("orthonormal_range_basis: empty matrix");
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  const double cut = kRankTolFactor * (sigma.size() ? sigma(0) : 0.0);
  Index r = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace cgmom
