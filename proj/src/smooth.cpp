#include "cgmom/smooth.hpp"

#include <chrono>
#include <cmath>

namespace cgmom {

QuadraticProblem::QuadraticProblem(Matrix a, Vector rhs, std::optional<Vector> gt)
    : A(std::move(a)), b(std::move(rhs)), ground_truth(std::move(gt)) {
  if (A.rows() != A.cols()) throw std::invalid_argument("QuadraticProblem: A must be square");
  if (b.size() != A.rows()) throw std::invalid_argument("QuadraticProblem: b length mismatch");
  const double fro = A.norm();
  if ((A - A.transpose()).norm() > 1e-12 * fro) {
    throw std::invalid_argument("QuadraticProblem: A is not symmetric");
  }
  if (ground_truth && ground_truth->size() != A.rows()) {
    throw std::invalid_argument("QuadraticProblem: ground truth length mismatch");
  }
}

void SmoothSolverSpec::validate() const {
  if (max_iters <= 0) throw std::invalid_argument("SmoothSolverSpec: max_iters must be positive");
  if (record_every <= 0) throw std::invalid_argument("SmoothSolverSpec: record_every must be positive");
  if (stop_tol < 0) throw std::invalid_argument("SmoothSolverSpec: stop_tol must be nonnegative");
  if (algorithm == SmoothAlgorithm::SD && !step.exact) {
    throw std::invalid_argument("SmoothSolverSpec: SD requires exact line search");
  }
  if (!step.exact && !(step.alpha > 0)) {
    throw std::invalid_argument("SmoothSolverSpec: fixed step size must be positive");
  }
}

Vector quad_grad(const QuadraticProblem& p, const Vector& x) {
  if (x.size() != p.size()) throw std::invalid_argument("quad_grad: dimension mismatch");
  return p.A * x + p.b;
}

double quad_objective(const QuadraticProblem& p, const Vector& x) {
  return 0.5 * x.dot(p.A * x) + x.dot(p.b);
}

std::optional<double> exact_line_search(const QuadraticProblem& p, const Vector& x,
                                        const Vector& dir) {
  const double curvature = dir.dot(p.A * dir);
  if (curvature <= 1e-14 * dir.squaredNorm()) return std::nullopt;
  return -dir.dot(p.A * x + p.b) / curvature;
}

std::optional<double> momentum_coefficient(MomentumKind kind, const Vector& g_curr,
                                           const Vector& g_prev, const Vector& anchor,
                                           HsDyAnchor form) {
  const Vector dg = g_curr - g_prev;
  double num = 0.0, den = 0.0;
  switch (kind) {
    case MomentumKind::FR:
      num = g_curr.squaredNorm();
      den = g_prev.squaredNorm();
      break;
    case MomentumKind::PR:
      num = g_curr.dot(dg);
      den = g_prev.squaredNorm();
      break;
    case MomentumKind::HS:
      num = g_curr.dot(dg);
      den = form == HsDyAnchor::IterateVerbatim ? -anchor.dot(dg) : anchor.dot(dg);
      break;
    case MomentumKind::DY:
      num = g_curr.squaredNorm();
      den = form == HsDyAnchor::IterateVerbatim ? -anchor.dot(dg) : anchor.dot(dg);
      break;
  }
  if (std::abs(den) <= 1e-14 * std::max(std::abs(num), 1e-300)) return std::nullopt;
  return num / den;
}

namespace {

struct Recorder {
  const QuadraticProblem& p;
  const SmoothSolverSpec& spec;
  Trace& trace;

  void record(long iter, const Vector& x, double grad_norm, std::optional<double> alpha,
              std::optional<double> beta, std::vector<std::string> flags = {}) {
    TraceRow row;
    row.iter = iter;
    row.objective = quad_objective(p, x);
    row.norm = grad_norm;
    if (p.ground_truth) row.rel_error = relative_error(x, *p.ground_truth);
    row.alpha = alpha;
    row.beta = beta;
    row.flags = std::move(flags);
    trace.rows.push_back(std::move(row));
  }
};

}  // namespace

const char* smooth_algorithm_name(SmoothAlgorithm a) {
  switch (a) {
    case SmoothAlgorithm::GD: return "gd";
    case SmoothAlgorithm::SD: return "sd";
    case SmoothAlgorithm::GDM: return "gdm";
    case SmoothAlgorithm::NAG: return "nag";
    case SmoothAlgorithm::FRGD: return "frgd";
  }
  return "?";
}

Trace run_smooth(const QuadraticProblem& p, const SmoothSolverSpec& spec, const Vector& x0,
                 std::vector<Vector>* iterates_out) {
  spec.validate();
  if (x0.size() != p.size()) throw std::invalid_argument("run_smooth: x0 dimension mismatch");
  const auto started = std::chrono::steady_clock::now();

  Trace trace;
  trace.label = std::string(smooth_algorithm_name(spec.algorithm)) +
                (spec.step.exact ? "-ls" : "-fx");
  trace.spec_echo = trace.label +
                    (spec.step.exact ? "" : " alpha=" + format_double(spec.step.alpha)) +
                    (spec.algorithm == SmoothAlgorithm::GDM
                         ? " beta=" + format_double(spec.momentum_beta)
                         : "") +
                    " iters=" + std::to_string(spec.max_iters) +
                    " tol=" + format_double(spec.stop_tol);
  Recorder rec{p, spec, trace};

  Vector x = x0;
  Vector g = quad_grad(p, x);
  Vector g_prev;
  Vector dir = Vector::Zero(p.size());  // previous search direction (GDM, FRGD)
  Vector y_prev = x;                    // NAG
  double t = 1.0;                       // NAG

  if (iterates_out) iterates_out->push_back(x);
  rec.record(0, x, g.norm(), std::nullopt, std::nullopt);

  const bool use_stop = spec.stop_tol > 0.0;
  for (long l = 0; l < spec.max_iters; ++l) {
    if (use_stop && g.norm() <= spec.stop_tol) break;

    std::optional<double> beta_rec;
    std::vector<std::string> flags;
    Vector p_new;

    switch (spec.algorithm) {
      case SmoothAlgorithm::GD:
      case SmoothAlgorithm::SD:
        p_new = -g;
        break;
      case SmoothAlgorithm::GDM:
        p_new = -g + spec.momentum_beta * dir;
        beta_rec = spec.momentum_beta;
        break;
      case SmoothAlgorithm::FRGD: {
        if (l == 0) {
          p_new = -g;
        } else {
          auto beta = momentum_coefficient(MomentumKind::FR, g, g_prev, x);
          if (!beta) {
            beta = 0.0;
            flags.push_back(flag::kBetaFallback);
          }
          beta_rec = *beta;
          p_new = -g + *beta * dir;
        }
        break;
      }
      case SmoothAlgorithm::NAG:
        p_new = -g;
        break;
    }

    double alpha;
    if (spec.step.exact) {
      auto a = exact_line_search(p, x, p_new);
      if (!a) {
        // x is unchanged; flag the stop on the existing row for iter l when
        // one was recorded, keeping iteration indices strictly increasing
        if (!trace.rows.empty() && trace.rows.back().iter == l) {
          trace.rows.back().flags.push_back(flag::kDegenerateDirection);
        } else {
          flags.push_back(flag::kDegenerateDirection);
          rec.record(l, x, g.norm(), std::nullopt, beta_rec, std::move(flags));
        }
        break;
      }
      alpha = *a;
    } else {
      alpha = spec.step.alpha;
    }

    if (spec.algorithm == SmoothAlgorithm::NAG) {
      const double t_next = (1.0 + std::sqrt(4.0 * t * t + 1.0)) / 2.0;
      const double extrap = (t - 1.0) / t_next;
      Vector y_new = x + alpha * p_new;
      x = y_new + extrap * (y_new - y_prev);
      y_prev = std::move(y_new);
      t = t_next;
      beta_rec = extrap;
    } else {
      x += alpha * p_new;
      dir = std::move(p_new);
    }

    g_prev = std::move(g);
    g = quad_grad(p, x);
    if (iterates_out) iterates_out->push_back(x);

    const long iter = l + 1;
    const double gnorm = g.norm();
    const bool finite = std::isfinite(gnorm) && std::isfinite(x.sum());
    if (!finite) {
      flags.push_back(flag::kDiverged);
      rec.record(iter, x, gnorm, alpha, beta_rec, std::move(flags));
      break;
    }
    if (iter % spec.record_every == 0 || iter == spec.max_iters || !flags.empty() ||
        (use_stop && gnorm <= spec.stop_tol)) {
      rec.record(iter, x, gnorm, alpha, beta_rec, std::move(flags));
    }
  }
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

bool BoundReport::all_hold() const {
  for (const BoundRow& r : rows)
    if (!r.holds) return false;
  return true;
}

BoundReport verify_convergence_bound(const QuadraticProblem& p, const std::vector<Vector>& iterates,
                            double alpha) {
  const SvdSpectrum spec_a = svd_spectrum(p.A);
  const double sigma_max = spec_a.spectral_norm();
  const double sigma_min = spec_a.singular_values(spec_a.singular_values.size() - 1);
  if (sigma_min <= kRankTolFactor * sigma_max) {
    throw std::invalid_argument("verify_convergence_bound: A is numerically singular (sigma_min = " +
                                format_double(sigma_min) + ", sigma_max = " +
                                format_double(sigma_max) + "); a strictly SPD matrix is required");
  }

  BoundReport report;
  report.spectral_norm_A = sigma_max;
  report.kappa_A = sigma_max / sigma_min;
  const double geo = (std::sqrt(report.kappa_A) - 1.0) / (std::sqrt(report.kappa_A) + 1.0);

  std::vector<double> res_norms;
  Matrix z(p.size(), static_cast<Index>(iterates.size()));
  double rho = 0.0;
  double geo_pow = 1.0;

  for (std::size_t l = 0; l < iterates.size(); ++l) {
    const Vector r = p.A * iterates[l] + p.b;
    const double rn = r.norm();
    if (rn == 0.0) break;  // z_l undefined; bound vacuous from here on
    z.col(static_cast<Index>(l)) = r / rn;

    const auto zl = z.leftCols(static_cast<Index>(l + 1));
    const SvdSpectrum zs = svd_spectrum(zl);
    if (zs.rank() < static_cast<Index>(l + 1)) break;  // columns dependent: the independence assumption fails

    // rho over pairs 0 <= j <= i <= l-1 of ||r_i|| / ||r_j||
    for (std::size_t j = 0; l >= 1 && j < res_norms.size(); ++j) {
      rho = std::max(rho, res_norms[l - 1] / res_norms[j]);
    }

    BoundRow row;
    row.l = static_cast<long>(l);
    row.lhs = rn;
    row.z_rank = zs.rank();
    const double dl = static_cast<double>(l);
    row.k_l_stmt = dl * (1.0 + dl * rho / 2.0) * sigma_max * zs.cond();
    row.k_l = alpha * row.k_l_stmt;
    row.rhs = 2.0 * (1.0 + row.k_l) * geo_pow * (l == 0 ? rn : res_norms[0]);
    row.holds = row.lhs <= row.rhs * (1.0 + 1e-8);
    report.rows.push_back(row);

    res_norms.push_back(rn);
    geo_pow *= geo;
  }
  report.rho = rho;
  return report;
}

}  // namespace cgmom
