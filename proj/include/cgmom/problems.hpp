#pragma once

#include "cgmom/composite.hpp"
#include "cgmom/linalg.hpp"
#include "cgmom/prox.hpp"
#include "cgmom/rng.hpp"
#include "cgmom/smooth.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace cgmom {

// Substream tags so one master seed drives independent draws.
inline constexpr std::uint64_t kMatrixStream = 1;
inline constexpr std::uint64_t kSignalStream = 2;
inline constexpr std::uint64_t kNoiseStream = 3;
inline constexpr std::uint64_t kRhsStream = 4;

/// Laplacian of the circular graph on n vertices: 2 on the diagonal, -1 on
/// the sub/super diagonals and in the corners. Symmetric PSD with null space
/// span{1} and spectral norm at most 4. Requires n >= 3.
Matrix circular_graph_laplacian(int n);

/// i.i.d. N(0, 1/m) entries (columns unit norm in expectation); bit-identical
/// for identical (m, n, seed).
Matrix gaussian_sensing_matrix(Index m, Index n, std::uint64_t seed);

/// Vector of i.i.d. standard normal entries.
Vector gaussian_vector(Index n, std::uint64_t seed);

/// Random strictly SPD matrix G^T G / n + I with G ~ N(0,1)^{n x n}.
Matrix random_spd_matrix(Index n, std::uint64_t seed);

/// Exactly s nonzeros on a uniformly chosen support; nonzero values are
/// standard normal resampled until |v| >= 0.1.
Vector sparse_signal(Index n, Index s, std::uint64_t seed);

/// clean + noise with the Gaussian noise rescaled so that
/// 20*log10(||clean|| / ||noise||) equals snr_db exactly.
Vector add_noise_snr(const Vector& clean, double snr_db, std::uint64_t seed);

/// Componentwise Euclidean projection onto the multi-valued sign of x_star:
/// +1 / -1 on the support, clamp(v, -1, 1) off it.
Vector sign_projection(const Vector& v, const Vector& x_star);

struct ConstructionResult {
  Vector b;
  Vector w;  // the selected subgradient of ||.||_1 at x_star
  bool converged = false;
  double residual = 0.0;
  long iterations = 0;
};

/// Builds a right-hand side b so that x_star is a stationary point of
/// lambda*||x||_1 + 0.5*||Ax - b||^2, by alternating projections between
/// Sign(x_star) and Range(A^T), then b = lambda*y + A*x_star with A^T y = w.
ConstructionResult construct_l1_rhs(const Matrix& a, double lambda, const Vector& x_star,
                                    long max_iters = 10000, double tol = 1e-12);

/// Same for lambda*(||x||_1 - ||x||_2): the projected point is shifted by
/// x_star/||x_star||_2 inside the range projection. The iteration may
/// legitimately fail to converge (coherent A); callers should retry with a
/// fresh seed when converged is false.
ConstructionResult construct_l12_rhs(const Matrix& a, double lambda, const Vector& x_star,
                                     long max_iters = 10000, double tol = 1e-12);

enum class ProblemFamily { QuadLaplacian, SparseRandom, SparseConstructed };

struct ProblemRecipe {
  ProblemFamily family = ProblemFamily::SparseConstructed;
  Index rows = 256;
  Index cols = 1024;
  Index sparsity = 5;
  double snr_db = 30.0;
  double lambda = 0.1;
  std::uint64_t seed = 1;
  RegularizerKind reg = RegularizerKind::L1;

  void validate() const;
  std::string describe() const;
};

struct SparseInstance {
  ProblemRecipe recipe;
  Matrix A;
  Vector b;
  Vector x_star;
  std::uint64_t effective_seed = 0;  // recipe.seed + retry offset
  bool construction_converged = true;

  CompositeProblem problem() const {
    return CompositeProblem(A, b, recipe.lambda, recipe.reg, x_star);
  }
};

/// Generates the instance for a recipe (one attempt; pure in (recipe, seed)).
SparseInstance make_sparse_instance(const ProblemRecipe& recipe);

/// Retries constructed recipes with seed+1, seed+2, ... until the alternating
/// projection converges; throws std::runtime_error after max_attempts.
SparseInstance make_sparse_instance_with_retries(const ProblemRecipe& recipe, int max_attempts = 20);

/// The centered Laplacian quadratic benchmark: b = -(e_1 - 1/n) so a
/// stationary point exists; ground truth is the minimum-norm solution.
/// With centered = false, b = e_1 verbatim and no ground truth is attached.
QuadraticProblem laplacian_quadratic(int n, bool centered = true);

}  // namespace cgmom
