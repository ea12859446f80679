#include "cgmom/problems.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace cgmom {

Matrix circular_graph_laplacian(int n) {
  if (n < 3) throw std::invalid_argument("circular_graph_laplacian: n must be at least 3");
  Matrix l = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    l(i, i) = 2.0;
    l(i, (i + 1) % n) = -1.0;
    l((i + 1) % n, i) = -1.0;
  }
  return l;
}

Matrix gaussian_sensing_matrix(Index m, Index n, std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("gaussian_sensing_matrix: bad dimensions");
  Xoshiro256pp rng(seed);
  Matrix a(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = scale * rng.next_gaussian();
  return a;
}

Vector gaussian_vector(Index n, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.next_gaussian();
  return v;
}

Matrix random_spd_matrix(Index n, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.next_gaussian();
  Matrix a = (g.transpose() * g) / static_cast<double>(n);
  a += Matrix::Identity(n, n);
  // exact symmetry against accumulation-order rounding
  return ((a + a.transpose()) * 0.5).eval();
}

Vector sparse_signal(Index n, Index s, std::uint64_t seed) {
  if (s <= 0 || s > n) throw std::invalid_argument("sparse_signal: need 0 < s <= n");
  Xoshiro256pp rng(seed);
  // partial Fisher-Yates for the support
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < s; ++i) {
    const Index j = i + static_cast<Index>(rng.next() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Vector x = Vector::Zero(n);
  for (Index i = 0; i < s; ++i) {
    double v = rng.next_gaussian();
    while (std::abs(v) < 0.1) v = rng.next_gaussian();  // keep nonzeros honest
    x(idx[static_cast<std::size_t>(i)]) = v;
  }
  return x;
}

Vector add_noise_snr(const Vector& clean, double snr_db, std::uint64_t seed) {
  const double cn = clean.norm();
  if (cn == 0.0) throw std::invalid_argument("add_noise_snr: clean signal is zero");
  Vector noise = gaussian_vector(clean.size(), seed);
  const double target = cn * std::pow(10.0, -snr_db / 20.0);
  noise *= target / noise.norm();
  return clean + noise;
}

Vector sign_projection(const Vector& v, const Vector& x_star) {
  if (v.size() != x_star.size()) throw std::invalid_argument("sign_projection: length mismatch");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    if (x_star(i) > 0.0) {
      out(i) = 1.0;
    } else if (x_star(i) < 0.0) {
      out(i) = -1.0;
    } else {
      out(i) = std::clamp(v(i), -1.0, 1.0);
    }
  }
  return out;
}

namespace {

// Alternating projection between Sign(x_star) and the affine set
// shift + Range(A^T); shift = 0 recovers the plain l1 construction.
ConstructionResult construct_rhs_impl(const Matrix& a, double lambda, const Vector& x_star,
                                      const Vector& shift, long max_iters, double tol) {
  if (x_star.size() != a.cols()) throw std::invalid_argument("construct_rhs: x_star length mismatch");
  if (!(lambda > 0)) throw std::invalid_argument("construct_rhs: lambda must be positive");
  if (x_star.norm() == 0.0) throw std::invalid_argument("construct_rhs: x_star must be nonzero");

  const Matrix at = a.transpose();
  const Matrix u = orthonormal_range_basis(at);

  Vector w = sign_projection(Vector::Zero(x_star.size()), x_star);
  double residual = std::numeric_limits<double>::infinity();
  long used = 0;
  bool converged = false;
  for (long k = 0; k < max_iters; ++k) {
    const Vector centered = w - shift;
    const Vector projected = u * (u.transpose() * centered);
    residual = (centered - projected).norm();
    ++used;
    if (residual <= tol) {
      converged = true;
      break;
    }
    w = sign_projection(projected + shift, x_star);
  }

  ConstructionResult result;
  result.w = w;
  result.converged = converged;
  result.residual = residual;
  result.iterations = used;
  const Vector y = least_squares_solve(at, w - shift);
  result.b = lambda * y + a * x_star;
  return result;
}

}  // namespace

ConstructionResult construct_l1_rhs(const Matrix& a, double lambda, const Vector& x_star,
                                    long max_iters, double tol) {
  return construct_rhs_impl(a, lambda, x_star, Vector::Zero(x_star.size()), max_iters, tol);
}

ConstructionResult construct_l12_rhs(const Matrix& a, double lambda, const Vector& x_star,
                                     long max_iters, double tol) {
  const double xn = x_star.norm();
  if (xn == 0.0) throw std::invalid_argument("construct_l12_rhs: x_star must be nonzero");
  return construct_rhs_impl(a, lambda, x_star, x_star / xn, max_iters, tol);
}

void ProblemRecipe::validate() const {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("ProblemRecipe: bad dimensions");
  if (sparsity <= 0 || sparsity > cols) throw std::invalid_argument("ProblemRecipe: bad sparsity");
  if (!(lambda > 0)) throw std::invalid_argument("ProblemRecipe: lambda must be positive");
}

std::string ProblemRecipe::describe() const {
  std::string fam = family == ProblemFamily::QuadLaplacian    ? "quad-laplacian"
                    : family == ProblemFamily::SparseRandom   ? "sparse-random"
                                                              : "sparse-constructed";
  return fam + " " + std::to_string(rows) + "x" + std::to_string(cols) +
         " s=" + std::to_string(sparsity) + " seed=" + std::to_string(seed) +
         " reg=" + (reg == RegularizerKind::L1 ? "l1" : "l12");
}

SparseInstance make_sparse_instance(const ProblemRecipe& recipe) {
  recipe.validate();
  SparseInstance inst;
  inst.recipe = recipe;
  inst.effective_seed = recipe.seed;
  inst.A = gaussian_sensing_matrix(recipe.rows, recipe.cols, derive_seed(recipe.seed, kMatrixStream));
  inst.x_star = sparse_signal(recipe.cols, recipe.sparsity, derive_seed(recipe.seed, kSignalStream));

  if (recipe.family == ProblemFamily::SparseRandom) {
    const Vector clean = inst.A * inst.x_star;
    inst.b = add_noise_snr(clean, recipe.snr_db, derive_seed(recipe.seed, kNoiseStream));
    inst.construction_converged = true;
  } else if (recipe.family == ProblemFamily::SparseConstructed) {
    const ConstructionResult c = recipe.reg == RegularizerKind::L1
                                     ? construct_l1_rhs(inst.A, recipe.lambda, inst.x_star)
                                     : construct_l12_rhs(inst.A, recipe.lambda, inst.x_star);
    inst.b = c.b;
    inst.construction_converged = c.converged;
  } else {
    throw std::invalid_argument("make_sparse_instance: recipe is not a sparse family");
  }
  return inst;
}

SparseInstance make_sparse_instance_with_retries(const ProblemRecipe& recipe, int max_attempts) {
  ProblemRecipe attempt = recipe;
  for (int k = 0; k < max_attempts; ++k) {
    attempt.seed = recipe.seed + static_cast<std::uint64_t>(k);
    SparseInstance inst = make_sparse_instance(attempt);
    if (inst.construction_converged) {
      inst.recipe = recipe;
      inst.effective_seed = attempt.seed;
      return inst;
    }
  }
  throw std::runtime_error("instance construction did not converge after " +
                           std::to_string(max_attempts) + " seeds starting at " +
                           std::to_string(recipe.seed));
}

QuadraticProblem laplacian_quadratic(int n, bool centered) {
  Matrix l = circular_graph_laplacian(n);
  Vector e1 = Vector::Zero(n);
  e1(0) = 1.0;
  if (!centered) {
    return QuadraticProblem(std::move(l), std::move(e1));
  }
  Vector target = e1 - Vector::Constant(n, 1.0 / n);
  Vector x_star = least_squares_solve(l, target);
  return QuadraticProblem(std::move(l), -target, std::move(x_star));
}

}  // namespace cgmom
