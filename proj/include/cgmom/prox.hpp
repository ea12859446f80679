#pragma once

#include "cgmom/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace cgmom {

enum class RegularizerKind { L1, L1MinusL2 };

/// Value of the sparsity regularizer: ||x||_1 for L1, ||x||_1 - ||x||_2 for
/// L1MinusL2. The latter is nonnegative (Cauchy-Schwarz) and vanishes exactly
/// on zero and 1-sparse vectors; tiny negative rounding is clamped to zero.
template <typename Derived>
double reg_value(RegularizerKind kind, const Eigen::MatrixBase<Derived>& x) {
  const double l1 = x.template lpNorm<1>();
  if (kind == RegularizerKind::L1) return l1;
  return std::max(0.0, l1 - x.norm());
}

/// Soft thresholding: sign(x) .* max(|x| - mu, 0), the proximal operator of
/// mu*||.||_1. Unique minimizer of mu*||y||_1 + 0.5*||x - y||^2.
template <typename Derived>
Vector prox_l1(const Eigen::MatrixBase<Derived>& x, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("prox_l1: mu must be positive");
  return x.array().sign() * (x.array().abs() - mu).max(0.0);
}

/// Proximal operator of lam*(||.||_1 - ||.||_2).
///
/// If ||y||_inf > lam the minimizer is unique: z*(||z||_2 + lam)/||z||_2 with
/// z = prox_l1(y; lam). Otherwise every minimizer places mass ||y||_inf on a
/// single coordinate attaining |y_i| = ||y||_inf (sign matching y); we select
/// the smallest such index, with exact floating-point equality, so repeated
/// runs pick the same solution. y = 0 maps to 0.
Vector prox_l1_minus_l2(const Vector& y, double lam);

/// Euclidean distance from v to the subdifferential of ||.||_1 at x, i.e. to
/// {p : p_i = sign(x_i) if x_i != 0, p_i in [-1,1] otherwise}.
double l1_subdiff_distance(const Vector& x, const Vector& v);

}  // namespace cgmom
