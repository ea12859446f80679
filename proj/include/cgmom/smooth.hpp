#pragma once

#include "cgmom/linalg.hpp"
#include "cgmom/trace.hpp"

#include <optional>
#include <vector>

namespace cgmom {

/// min_x g(x) = 0.5 x^T A x + x^T b with symmetric A; the minimizer (when A is
/// nonsingular) is -A^{-1} b.
struct QuadraticProblem {
  Matrix A;
  Vector b;
  std::optional<Vector> ground_truth;

  QuadraticProblem(Matrix a, Vector rhs, std::optional<Vector> gt = std::nullopt);
  Index size() const { return A.rows(); }
};

enum class SmoothAlgorithm { GD, SD, GDM, NAG, FRGD };

enum class MomentumKind { FR, PR, HS, DY };

struct StepMode {
  bool exact = false;
  double alpha = 0.3;

  static StepMode fixed(double a) { return StepMode{false, a}; }
  static StepMode exact_line_search() { return StepMode{true, 0.0}; }
};

struct SmoothSolverSpec {
  SmoothAlgorithm algorithm = SmoothAlgorithm::GD;
  StepMode step = StepMode::fixed(0.3);
  double momentum_beta = 0.9;  // GDM only
  long max_iters = 1000;
  double stop_tol = 0.0;  // on the gradient norm; 0 disables
  long record_every = 1;

  void validate() const;  // throws std::invalid_argument on bad combinations
};

/// Gradient of the quadratic model: A x + b.
Vector quad_grad(const QuadraticProblem& p, const Vector& x);

double quad_objective(const QuadraticProblem& p, const Vector& x);

/// Exact minimizer of alpha -> g(x + alpha p): -p^T(Ax+b) / (p^T A p).
/// Returns nullopt when p^T A p <= 1e-14 ||p||^2 (degenerate direction).
std::optional<double> exact_line_search(const QuadraticProblem& p, const Vector& x,
                                        const Vector& dir);

/// Which vector anchors the Hestenes-Stiefel / Dai-Yuan denominator.
/// IterateVerbatim uses -<x_curr, dg>; DirectionConventional uses +<p, dg>
/// with the previous search direction passed as anchor (the textbook form).
enum class HsDyAnchor { IterateVerbatim, DirectionConventional };

/// Momentum coefficient beta for the given update family, evaluated on the
/// gradients at the current and previous iterates:
///   FR: ||g||^2 / ||g_prev||^2
///   PR: <g, g - g_prev> / ||g_prev||^2
///   HS: <g, g - g_prev> / denom      DY: ||g||^2 / denom
/// Returns nullopt when the denominator is negligible relative to the
/// numerator (callers fall back to beta = 0).
std::optional<double> momentum_coefficient(MomentumKind kind, const Vector& g_curr,
                                           const Vector& g_prev, const Vector& anchor,
                                           HsDyAnchor form = HsDyAnchor::IterateVerbatim);

/// Runs the selected iteration from x0 and records a trace. FRGD starts with
/// p = -grad(x0) and applies the FR coefficient from the second step on; NAG
/// uses the t-sequence t' = (1 + sqrt(4 t^2 + 1))/2; GDM uses the fixed
/// momentum_beta with p(0) = 0. When iterates_out is non-null every iterate
/// (including x0) is appended for later analysis.
Trace run_smooth(const QuadraticProblem& p, const SmoothSolverSpec& spec, const Vector& x0,
                 std::vector<Vector>* iterates_out = nullptr);

struct BoundRow {
  long l = 0;
  double lhs = 0.0;     // ||r_l||
  double k_l = 0.0;     // l*alpha*(1 + l*rho/2)*||A||_2*cond(Z_{l+1})
  double k_l_stmt = 0.0;  // same without the alpha factor
  double rhs = 0.0;     // 2(1+k_l) * ((sqrt(k)-1)/(sqrt(k)+1))^l * ||r_0||
  bool holds = false;
  Index z_rank = 0;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double kappa_A = 0.0;
  double spectral_norm_A = 0.0;
  double rho = 0.0;  // residual-ratio bound at the last verified step

  bool all_hold() const;
};

/// Checks the fixed-step FR gradient-descent convergence bound on a recorded
/// run: for each l while the normalized residual matrix Z_{l+1} has full
/// column rank, lhs = ||r_l|| must satisfy lhs <= rhs * (1 + 1e-8). The report
/// truncates at the first rank deficiency. Requires strictly SPD A
/// (sigma_min > 1e-10 sigma_max); throws otherwise.
BoundReport verify_convergence_bound(const QuadraticProblem& p, const std::vector<Vector>& iterates,
                            double alpha);

const char* smooth_algorithm_name(SmoothAlgorithm a);

}  // namespace cgmom
