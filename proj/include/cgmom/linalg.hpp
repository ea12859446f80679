#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cgmom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Relative rank tolerance used for every rank decision in the library:
/// a singular value sigma counts toward the rank iff sigma > kRankTolFactor * sigma_max.
inline constexpr double kRankTolFactor = 1e-10;

inline Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    throw std::invalid_argument("matvec: dimension mismatch (" + std::to_string(a.cols()) +
                                " cols vs vector of length " + std::to_string(x.size()) + ")");
  }
  return a * x;
}

template <typename Derived>
double norm2(const Eigen::MatrixBase<Derived>& x) {
  return x.norm();
}

template <typename Derived>
double norm_inf(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

template <typename DerivedA, typename DerivedB>
double dot(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("dot: length mismatch");
  }
  return x.dot(y);
}

/// Singular-value summary of a dense matrix (values descending).
struct SvdSpectrum {
  Vector singular_values;

  double spectral_norm() const { return singular_values.size() ? singular_values(0) : 0.0; }

  double cond() const {
    const double smin = singular_values(singular_values.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return spectral_norm() / smin;
  }

  Index rank(double tol_factor = kRankTolFactor) const {
    const double cut = tol_factor * spectral_norm();
    Index r = 0;
    for (Index i = 0; i < singular_values.size(); ++i)
      if (singular_values(i) > cut) ++r;
    return r;
  }
};

SvdSpectrum svd_spectrum(const Matrix& a);

/// Minimum-norm least-squares solution of A x ~ y via the pseudo-inverse.
Vector least_squares_solve(const Matrix& a, const Vector& y);

/// Orthonormal basis U of the numerical column space of M (U^T U = I).
Matrix orthonormal_range_basis(const Matrix& m);

}  // namespace cgmom
