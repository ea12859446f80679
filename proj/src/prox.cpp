#include "cgmom/prox.hpp"

namespace cgmom {

Vector prox_l1_minus_l2(const Vector& y, double lam) {
  if (!(lam > 0.0)) throw std::invalid_argument("prox_l1_minus_l2: lam must be positive");
  const double ymax = norm_inf(y);
  if (ymax == 0.0) return Vector::Zero(y.size());

  if (ymax > lam) {
    Vector z = prox_l1(y, lam);
    const double zn = z.norm();
    return z * ((zn + lam) / zn);
  }

  // ||y||_inf <= lam: all mass goes to the first coordinate attaining the max.
  Vector c = Vector::Zero(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    if (std::abs(y(i)) == ymax) {
      c(i) = y(i) > 0 ? ymax : -ymax;
      break;
    }
  }
  return c;
}

double l1_subdiff_distance(const Vector& x, const Vector& v) {
  if (x.size() != v.size()) throw std::invalid_argument("l1_subdiff_distance: length mismatch");
  double sq = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) {
      const double d = v(i) - (x(i) > 0 ? 1.0 : -1.0);
      sq += d * d;
    } else {
      const double excess = std::max(std::abs(v(i)) - 1.0, 0.0);
      sq += excess * excess;
    }
  }
  return std::sqrt(sq);
}

}  // namespace cgmom
