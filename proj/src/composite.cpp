#include "cgmom/composite.hpp"

#include <chrono>
#include <cmath>

namespace cgmom {

CompositeProblem::CompositeProblem(Matrix a, Vector b, double lambda, RegularizerKind reg,
                                   std::optional<Vector> ground_truth)
    : a_(std::move(a)),
      b_(std::move(b)),
      lambda_(lambda),
      reg_(reg),
      ground_truth_(std::move(ground_truth)) {
  if (a_.size() == 0) throw std::invalid_argument("CompositeProblem: empty matrix");
  if (b_.size() != a_.rows()) throw std::invalid_argument("CompositeProblem: b length mismatch");
  if (!(lambda_ > 0)) throw std::invalid_argument("CompositeProblem: lambda must be positive");
  if (ground_truth_ && ground_truth_->size() != a_.cols()) {
    throw std::invalid_argument("CompositeProblem: ground truth length mismatch");
  }
  use_gram_ = a_.cols() <= a_.rows();
  if (use_gram_) {
    gram_ = a_.transpose() * a_;
    atb_ = a_.transpose() * b_;
    b_sq_ = b_.squaredNorm();
  }
}

Vector CompositeProblem::smooth_gradient(const Vector& x) const {
  if (x.size() != cols()) throw std::invalid_argument("smooth_gradient: dimension mismatch");
  if (use_gram_) return gram_ * x - atb_;
  return a_.transpose() * (a_ * x - b_);
}

double CompositeProblem::smooth_value(const Vector& x) const {
  if (use_gram_) {
    return 0.5 * (x.dot(gram_ * x) - 2.0 * x.dot(atb_) + b_sq_);
  }
  return 0.5 * (a_ * x - b_).squaredNorm();
}

double CompositeProblem::objective(const Vector& x) const {
  return lambda_ * reg_value(reg_, x) + smooth_value(x);
}

double composite_objective(const CompositeProblem& p, const Vector& x) { return p.objective(x); }

Vector apply_prox(RegularizerKind reg, const Vector& v, double mu) {
  return reg == RegularizerKind::L1 ? prox_l1(v, mu) : prox_l1_minus_l2(v, mu);
}

Vector prox_gradient_step(const CompositeProblem& p, const Vector& x, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("prox_gradient_step: delta must be positive");
  return apply_prox(p.reg(), x - delta * p.smooth_gradient(x), delta * p.lambda());
}

void CompositeSolverSpec::validate() const {
  if (!(delta > 0)) throw std::invalid_argument("CompositeSolverSpec: delta must be positive");
  if (max_iters <= 0) throw std::invalid_argument("CompositeSolverSpec: max_iters must be positive");
  if (record_every <= 0) throw std::invalid_argument("CompositeSolverSpec: record_every must be positive");
  if (inner_max <= 0) throw std::invalid_argument("CompositeSolverSpec: inner_max must be positive");
  if (stop_tol < 0 || inner_tol < 0) {
    throw std::invalid_argument("CompositeSolverSpec: tolerances must be nonnegative");
  }
}

std::string composite_algorithm_label(const CompositeSolverSpec& spec) {
  switch (spec.algorithm) {
    case CompositeAlgorithm::ISTA: return "ista";
    case CompositeAlgorithm::FISTA: return "fista";
    case CompositeAlgorithm::APG: return "apg";
    case CompositeAlgorithm::DCA: return "dca";
    case CompositeAlgorithm::MomentumProx:
      switch (spec.momentum) {
        case MomentumKind::FR: return "frprox";
        case MomentumKind::PR: return "prprox";
        case MomentumKind::HS: return "hsprox";
        case MomentumKind::DY: return "dyprox";
      }
  }
  return "?";
}

namespace {

std::string spec_echo_text(const CompositeSolverSpec& spec) {
  std::string echo = composite_algorithm_label(spec) + " delta=" + format_double(spec.delta) +
                     " iters=" + std::to_string(spec.max_iters) +
                     " tol=" + format_double(spec.stop_tol);
  if (spec.algorithm == CompositeAlgorithm::DCA) {
    echo += " inner_max=" + std::to_string(spec.inner_max) +
            " inner_tol=" + format_double(spec.inner_tol);
  }
  return echo;
}

struct CompositeRecorder {
  const CompositeProblem& p;
  Trace& trace;

  void record(long iter, const Vector& x, double objective, double change,
              std::optional<double> beta, std::vector<std::string> flags = {}) {
    TraceRow row;
    row.iter = iter;
    row.objective = objective;
    row.norm = change;
    if (p.ground_truth()) row.rel_error = relative_error(x, *p.ground_truth());
    row.beta = beta;
    row.flags = std::move(flags);
    trace.rows.push_back(std::move(row));
  }
};

double nag_t_next(double t) { return (1.0 + std::sqrt(4.0 * t * t + 1.0)) / 2.0; }

}  // namespace

Trace run_composite(const CompositeProblem& p, const CompositeSolverSpec& spec, const Vector& x0,
                    Vector* final_x) {
  spec.validate();
  if (spec.algorithm == CompositeAlgorithm::DCA) {
    throw std::invalid_argument("run_composite: use run_dca for the DCA algorithm");
  }
  if (x0.size() != p.cols()) throw std::invalid_argument("run_composite: x0 dimension mismatch");
  const auto started = std::chrono::steady_clock::now();

  Trace trace;
  trace.label = composite_algorithm_label(spec);
  trace.spec_echo = spec_echo_text(spec);
  CompositeRecorder rec{p, trace};

  const double mu = spec.delta * p.lambda();
  const bool needs_grad_at_x =
      spec.algorithm == CompositeAlgorithm::ISTA || spec.algorithm == CompositeAlgorithm::APG ||
      spec.algorithm == CompositeAlgorithm::MomentumProx;

  Vector x = x0;
  Vector x_prev = x0;
  Vector u = x0;  // APG candidate sequence
  Vector g_x = needs_grad_at_x ? p.smooth_gradient(x) : Vector();
  double t = 1.0;
  double f_x = p.objective(x);

  // Momentum coefficients are evaluated on the prox-gradient mapping at the
  // x-iterates, (x - prox(x - delta*grad g(x); delta*lambda))/delta: the
  // composite residual that vanishes at stationary points, playing the role
  // the gradient plays for the smooth FR update.
  const bool momentum_prox = spec.algorithm == CompositeAlgorithm::MomentumProx;
  Vector map_x, map_x_prev;
  if (momentum_prox) map_x = (x - apply_prox(p.reg(), x - spec.delta * g_x, mu)) / spec.delta;

  rec.record(0, x, f_x, 0.0, std::nullopt);

  for (long l = 0; l < spec.max_iters; ++l) {
    std::optional<double> beta_rec;
    std::vector<std::string> flags;
    Vector x_new;
    std::optional<double> f_new;  // set when the update already computed it

    switch (spec.algorithm) {
      case CompositeAlgorithm::ISTA: {
        x_new = apply_prox(p.reg(), x - spec.delta * g_x, mu);
        break;
      }
      case CompositeAlgorithm::FISTA: {
        const double t_next = nag_t_next(t);
        const double extrap = (t - 1.0) / t_next;
        Vector y = x + extrap * (x - x_prev);
        x_new = apply_prox(p.reg(), y - spec.delta * p.smooth_gradient(y), mu);
        t = t_next;
        beta_rec = extrap;
        break;
      }
      case CompositeAlgorithm::APG: {
        const double t_next = nag_t_next(t);
        const double extrap = (t - 1.0) / t_next;
        Vector y = x + (t / t_next) * (u - x) + extrap * (x - x_prev);
        Vector u_new = apply_prox(p.reg(), y - spec.delta * p.smooth_gradient(y), mu);
        Vector v_new = apply_prox(p.reg(), x - spec.delta * g_x, mu);
        const double fu = p.objective(u_new);
        const double fv = p.objective(v_new);
        const double f_cand = std::min(fu, fv);
        if (f_cand <= f_x) {
          Vector chosen = fu <= fv ? u_new : v_new;
          x_new = std::move(chosen);
          f_new = f_cand;
        } else {
          // both candidates are computed-worse than the incumbent (rounding
          // territory near the plateau): hold position, keep descent exact
          x_new = x;
          f_new = f_x;
        }
        u = std::move(u_new);
        t = t_next;
        beta_rec = extrap;
        break;
      }
      case CompositeAlgorithm::MomentumProx: {
        double beta = 0.0;
        if (l > 0) {
          auto b = momentum_coefficient(spec.momentum, map_x, map_x_prev, x);
          if (!b) {
            flags.push_back(flag::kBetaFallback);
          } else {
            beta = *b;
            if (spec.cap_beta_at_one && beta > 1.0) beta = 1.0;
          }
        }
        beta_rec = beta;
        Vector y = x + beta * (x - x_prev);
        x_new = apply_prox(p.reg(), y - spec.delta * p.smooth_gradient(y), mu);
        break;
      }
      case CompositeAlgorithm::DCA:
        break;  // unreachable
    }

    const double change = (x_new - x).norm();
    const double denom = std::max(1.0, x.norm());
    if (needs_grad_at_x) g_x = p.smooth_gradient(x_new);
    if (momentum_prox) {
      map_x_prev = std::move(map_x);
      map_x = (x_new - apply_prox(p.reg(), x_new - spec.delta * g_x, mu)) / spec.delta;
    }
    x_prev = std::move(x);
    x = std::move(x_new);
    if (f_new) f_x = *f_new;  // APG keeps its objective cached for the guard

    const long iter = l + 1;
    const bool stopping = spec.stop_tol > 0.0 && change / denom <= spec.stop_tol;
    const bool finite = std::isfinite(change);
    bool diverged = !finite;
    const bool record_now =
        iter % spec.record_every == 0 || iter == spec.max_iters || stopping || !finite || !flags.empty();
    if (record_now) {
      const double f_rec = f_new ? *f_new : p.objective(x);
      diverged = diverged || !std::isfinite(f_rec);
      if (diverged) flags.push_back(flag::kDiverged);
      rec.record(iter, x, f_rec, change, beta_rec, std::move(flags));
    }
    if (diverged || stopping) break;
  }
  if (final_x) *final_x = x;
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

Trace run_dca(const CompositeProblem& p, const CompositeSolverSpec& spec, const Vector& x0,
              Vector* final_x) {
  spec.validate();
  if (p.reg() != RegularizerKind::L1MinusL2) {
    throw std::invalid_argument("run_dca: requires the l1-l2 regularizer");
  }
  if (x0.size() != p.cols()) throw std::invalid_argument("run_dca: x0 dimension mismatch");
  const auto started = std::chrono::steady_clock::now();

  Trace trace;
  trace.label = "dca";
  trace.spec_echo = spec_echo_text(spec);
  CompositeRecorder rec{p, trace};

  const double mu = spec.delta * p.lambda();
  Vector x = x0;
  rec.record(0, x, p.objective(x), 0.0, std::nullopt);

  long inner_total = 0;
  bool out_of_budget = false;
  while (!out_of_budget) {
    // Linearize -||x||_2 at the outer iterate; tilt = lambda * x / ||x||.
    const double xn = x.norm();
    const Vector tilt = xn > 0.0 ? Vector(p.lambda() / xn * x) : Vector(Vector::Zero(p.cols()));

    // FISTA on 0.5||Az - b||^2 - <z, tilt> + lambda ||z||_1, warm-started at x.
    Vector z = x;
    Vector z_prev = x;
    double t = 1.0;
    bool inner_done = false;
    for (long k = 0; k < spec.inner_max && !inner_done; ++k) {
      const double t_next = nag_t_next(t);
      const double extrap = (t - 1.0) / t_next;
      Vector y = z + extrap * (z - z_prev);
      Vector grad = p.smooth_gradient(y) - tilt;
      Vector z_new = prox_l1(y - spec.delta * grad, mu);
      t = t_next;

      const double change = (z_new - z).norm();
      const double denom = std::max(1.0, z.norm());
      z_prev = std::move(z);
      z = std::move(z_new);
      ++inner_total;

      const bool finite = std::isfinite(change);
      inner_done = !finite || change / denom <= spec.inner_tol;
      out_of_budget = inner_total >= spec.max_iters;

      if (inner_total % spec.record_every == 0 || inner_done || out_of_budget) {
        const double f = p.objective(z);
        std::vector<std::string> flags;
        if (!finite || !std::isfinite(f)) flags.push_back(flag::kDiverged);
        if (out_of_budget) flags.push_back(flag::kBudgetExhausted);
        rec.record(inner_total, z, f, change, extrap, std::move(flags));
        if (!finite || !std::isfinite(f)) {
          if (final_x) *final_x = z;
          trace.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
          return trace;
        }
      }
      if (out_of_budget) break;
    }

    const double outer_change = (z - x).norm() / std::max(1.0, x.norm());
    x = z;
    if (spec.stop_tol > 0.0 && outer_change <= spec.stop_tol) break;
  }
  if (final_x) *final_x = x;
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

double stationarity_residual(const CompositeProblem& p, const Vector& x) {
  Vector v = -p.smooth_gradient(x) / p.lambda();
  if (p.reg() == RegularizerKind::L1MinusL2) {
    const double xn = x.norm();
    if (xn > 0.0) v += x / xn;
  }
  return l1_subdiff_distance(x, v);
}

}  // namespace cgmom
