#pragma once

#include "cgmom/prox.hpp"
#include "cgmom/smooth.hpp"
#include "cgmom/trace.hpp"

namespace cgmom {

/// min_x F(x) = lambda*f(x) + 0.5*||A x - b||^2 with f the selected
/// sparsity regularizer. Immutable after construction; for tall matrices the
/// Gram matrix A^T A is cached so gradients cost O(N^2) instead of O(M N).
class CompositeProblem {
 public:
  CompositeProblem(Matrix a, Vector b, double lambda, RegularizerKind reg,
                   std::optional<Vector> ground_truth = std::nullopt);

  const Matrix& A() const { return a_; }
  const Vector& b() const { return b_; }
  double lambda() const { return lambda_; }
  RegularizerKind reg() const { return reg_; }
  const std::optional<Vector>& ground_truth() const { return ground_truth_; }
  Index rows() const { return a_.rows(); }
  Index cols() const { return a_.cols(); }

  /// Gradient of the smooth part: A^T (A x - b).
  Vector smooth_gradient(const Vector& x) const;
  double smooth_value(const Vector& x) const;  // 0.5 ||A x - b||^2
  double objective(const Vector& x) const;     // lambda*f(x) + smooth_value(x)

 private:
  Matrix a_;
  Vector b_;
  double lambda_;
  RegularizerKind reg_;
  std::optional<Vector> ground_truth_;

  bool use_gram_;
  Matrix gram_;   // A^T A when cols <= rows
  Vector atb_;    // A^T b
  double b_sq_ = 0.0;
};

enum class CompositeAlgorithm { ISTA, FISTA, APG, MomentumProx, DCA };

struct CompositeSolverSpec {
  CompositeAlgorithm algorithm = CompositeAlgorithm::FISTA;
  MomentumKind momentum = MomentumKind::FR;  // MomentumProx only
  double delta = 1e-3;                       // forward step size
  long max_iters = 1000;                     // for DCA: cumulative inner-iteration budget
  double stop_tol = 0.0;                     // on relative iterate change; 0 disables
  double inner_tol = 1e-10;                  // DCA subproblem stop
  long inner_max = 200;                      // DCA subproblem budget
  long record_every = 1;
  bool cap_beta_at_one = false;              // optional safeguard, off by default

  void validate() const;
};

double composite_objective(const CompositeProblem& p, const Vector& x);

/// prox_f(x - delta * grad g(x); delta * lambda) for the problem's regularizer.
Vector prox_gradient_step(const CompositeProblem& p, const Vector& x, double delta);

/// Dispatches the regularizer's proximal operator with parameter mu.
Vector apply_prox(RegularizerKind reg, const Vector& v, double mu);

/// ISTA / FISTA / APG / MomentumProx iterations (DCA has run_dca). Traces
/// record the objective, relative error against the ground truth when
/// available, and the iterate-change norm. The first extrapolation step of
/// FISTA / APG / MomentumProx uses x(-1) = x(0) so the momentum term vanishes.
/// MomentumProx feeds the momentum formulas the prox-gradient mapping at the
/// x-iterates — the composite stationarity residual — rather than the raw
/// smooth gradient, whose norm does not vanish at composite solutions. APG
/// keeps the incumbent iterate whenever both prox candidates evaluate worse,
/// so its recorded objective is non-increasing by construction. When final_x
/// is non-null it receives the last iterate.
Trace run_composite(const CompositeProblem& p, const CompositeSolverSpec& spec, const Vector& x0,
                    Vector* final_x = nullptr);

/// Difference-of-convex iteration for the l1-l2 objective: linearize -||x||_2
/// at the current outer iterate (subgradient 0 at x = 0) and solve the
/// resulting l1 subproblem with FISTA. Trace iterations count the cumulative
/// inner loop, and the run stops once max_iters inner iterations are spent.
Trace run_dca(const CompositeProblem& p, const CompositeSolverSpec& spec, const Vector& x0,
              Vector* final_x = nullptr);

/// Distance of the negated scaled gradient (plus the l2 subgradient term for
/// l1-l2) to the subdifferential of ||.||_1 at x; zero at stationary points.
double stationarity_residual(const CompositeProblem& p, const Vector& x);

std::string composite_algorithm_label(const CompositeSolverSpec& spec);

}  // namespace cgmom
