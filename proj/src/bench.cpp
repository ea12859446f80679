#include "cgmom/bench.hpp"

#include "cgmom/instance_io.hpp"
#include "cgmom/plot.hpp"
#include "cgmom/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

namespace cgmom::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kSweepStopTol = 1e-12;  // early-stop for tuning runs only

fs::path resolve_out_dir(const std::string& flag_value, const char* fallback) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CGMOM_OUT_DIR"); env && *env) return env;
  return fallback;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
}

struct QuadSolverChoice {
  SmoothAlgorithm algorithm;
  bool exact;
};

const std::map<std::string, QuadSolverChoice>& quad_registry() {
  static const std::map<std::string, QuadSolverChoice> reg = {
      {"gd-fx", {SmoothAlgorithm::GD, false}},   {"gd-ls", {SmoothAlgorithm::SD, true}},
      {"gdm-fx", {SmoothAlgorithm::GDM, false}}, {"gdm-ls", {SmoothAlgorithm::GDM, true}},
      {"nag-fx", {SmoothAlgorithm::NAG, false}}, {"nag-ls", {SmoothAlgorithm::NAG, true}},
      {"frgd-fx", {SmoothAlgorithm::FRGD, false}}, {"frgd-ls", {SmoothAlgorithm::FRGD, true}},
  };
  return reg;
}

struct SparseSolverChoice {
  CompositeAlgorithm algorithm;
  MomentumKind momentum = MomentumKind::FR;
};

const std::map<std::string, SparseSolverChoice>& sparse_registry() {
  static const std::map<std::string, SparseSolverChoice> reg = {
      {"ista", {CompositeAlgorithm::ISTA}},
      {"fista", {CompositeAlgorithm::FISTA}},
      {"apg", {CompositeAlgorithm::APG}},
      {"frprox", {CompositeAlgorithm::MomentumProx, MomentumKind::FR}},
      {"prprox", {CompositeAlgorithm::MomentumProx, MomentumKind::PR}},
      {"hsprox", {CompositeAlgorithm::MomentumProx, MomentumKind::HS}},
      {"dyprox", {CompositeAlgorithm::MomentumProx, MomentumKind::DY}},
      {"dca", {CompositeAlgorithm::DCA}},
  };
  return reg;
}

template <typename Registry>
std::string known_names(const Registry& reg) {
  std::string out;
  for (const auto& [name, _] : reg) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

double parse_positive(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0 && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string(what) + " must be a positive number, got '" + text + "'");
}

bool trace_convergent(const Trace& t) {
  if (t.rows.empty() || t.diverged()) return false;
  const double first = t.rows.front().objective;
  const double last = t.rows.back().objective;
  return std::isfinite(last) && last <= first;
}

Trace run_sparse_solver(const CompositeProblem& problem, const SparseSolverChoice& choice,
                        double delta, long iters, double stop_tol, long record_every,
                        long inner_max) {
  CompositeSolverSpec spec;
  spec.algorithm = choice.algorithm;
  spec.momentum = choice.momentum;
  spec.delta = delta;
  spec.max_iters = iters;
  spec.stop_tol = stop_tol;
  spec.record_every = record_every;
  spec.inner_max = inner_max;
  spec.inner_tol = kSweepStopTol;
  const Vector x0 = Vector::Zero(problem.cols());
  return choice.algorithm == CompositeAlgorithm::DCA ? run_dca(problem, spec, x0)
                                                     : run_composite(problem, spec, x0);
}

}  // namespace

std::vector<double> decade_grid() { return {1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1}; }

SweepResult tune_delta(const CompositeProblem& problem, CompositeSolverSpec spec, const Vector& x0) {
  SweepResult result;
  double best = std::numeric_limits<double>::infinity();
  spec.stop_tol = std::max(spec.stop_tol, kSweepStopTol);
  // sweep runs only need the endpoint objective; thin the recording stride
  spec.record_every = std::max(spec.record_every, 25L);
  for (double delta : decade_grid()) {
    spec.delta = delta;
    const Trace t = spec.algorithm == CompositeAlgorithm::DCA ? run_dca(problem, spec, x0)
                                                              : run_composite(problem, spec, x0);
    SweepOutcome outcome;
    outcome.delta = delta;
    outcome.convergent = trace_convergent(t);
    outcome.final_objective = t.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : t.rows.back().objective;
    // ties go to the larger delta: equal endpoints, faster convergence
    if (outcome.convergent && outcome.final_objective <= best) {
      best = outcome.final_objective;
      result.chosen = delta;
      result.any_convergent = true;
    }
    result.outcomes.push_back(outcome);
  }
  if (!result.any_convergent) result.chosen = decade_grid().front();
  return result;
}

SweepResult tune_lambda(const Matrix& a, const Vector& b, RegularizerKind reg,
                        const Vector& ground_truth, long iters) {
  SweepResult result;
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : decade_grid()) {
    CompositeProblem problem(a, b, lambda, reg, ground_truth);
    CompositeSolverSpec spec;
    spec.algorithm = CompositeAlgorithm::MomentumProx;
    spec.momentum = MomentumKind::FR;
    spec.delta = 1e-3;
    spec.max_iters = iters;
    spec.stop_tol = kSweepStopTol;
    spec.record_every = 25;
    const Trace t = run_composite(problem, spec, Vector::Zero(problem.cols()));
    SweepOutcome outcome;
    outcome.delta = lambda;  // the swept value
    outcome.convergent = trace_convergent(t);
    outcome.final_objective = t.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : t.rows.back().objective;
    if (outcome.convergent && outcome.final_objective < best) {
      best = outcome.final_objective;
      result.chosen = lambda;
      result.any_convergent = true;
    }
    result.outcomes.push_back(outcome);
  }
  if (!result.any_convergent) result.chosen = decade_grid().front();
  return result;
}

int cmd_quad(const QuadOptions& opts) {
  if (opts.n < 3) throw UsageError("quad: --n must be at least 3");
  if (opts.iters <= 0) throw UsageError("quad: --iters must be positive");
  if (!(opts.alpha > 0)) throw UsageError("quad: --alpha must be positive");
  if (opts.record_every <= 0) throw UsageError("quad: --record-every must be positive");

  std::vector<std::string> solvers = opts.solvers;
  if (solvers.empty()) {
    for (const auto& [name, _] : quad_registry()) solvers.push_back(name);
  }
  for (const auto& name : solvers) {
    if (!quad_registry().count(name)) {
      throw UsageError("quad: unknown solver '" + name + "'; valid: " + known_names(quad_registry()));
    }
  }

  const fs::path out_dir = resolve_out_dir(opts.out_dir, "out-quad");
  fs::create_directories(out_dir);

  const QuadraticProblem problem = laplacian_quadratic(opts.n, !opts.uncentered);

  std::vector<Trace> traces;
  for (const auto& name : solvers) {
    const QuadSolverChoice& choice = quad_registry().at(name);
    SmoothSolverSpec spec;
    spec.algorithm = choice.algorithm;
    spec.step = choice.exact ? StepMode::exact_line_search() : StepMode::fixed(opts.alpha);
    spec.momentum_beta = opts.gdm_beta;
    spec.max_iters = opts.iters;
    spec.record_every = opts.record_every;
    Trace t = run_smooth(problem, spec, Vector::Zero(opts.n));
    t.label = name;
    write_trace_csv(t, out_dir / (name + ".csv"));
    traces.push_back(std::move(t));
  }

  if (!opts.uncentered) {
    render_svg_plot(traces, TraceColumn::RelError, out_dir / "rel_error.svg", true);
  }
  render_svg_plot(traces, TraceColumn::Objective, out_dir / "objective.svg", false);

  json echo;
  echo["command"] = "quad";
  echo["n"] = opts.n;
  echo["alpha"] = opts.alpha;
  echo["gdm_beta"] = opts.gdm_beta;
  echo["iters"] = opts.iters;
  echo["record_every"] = opts.record_every;
  echo["centered"] = !opts.uncentered;
  echo["solvers"] = solvers;
  echo["out_dir"] = out_dir.string();
  write_text_atomic(out_dir / "config-echo.json", echo.dump(2) + "\n");
  return kExitOk;
}

int cmd_sparse(const SparseOptions& opts) {
  if (opts.rows <= 0 || opts.cols <= 0) throw UsageError("sparse: dimensions must be positive");
  if (opts.sparsity <= 0 || opts.sparsity > opts.cols) {
    throw UsageError("sparse: --sparsity must be in [1, cols]");
  }
  if (opts.reg != "l1" && opts.reg != "l12") throw UsageError("sparse: --reg must be l1 or l12");
  if (opts.mode != "constructed" && opts.mode != "random") {
    throw UsageError("sparse: --mode must be constructed or random");
  }
  if (opts.iters <= 0) throw UsageError("sparse: --iters must be positive");
  if (opts.record_every <= 0) throw UsageError("sparse: --record-every must be positive");
  const RegularizerKind reg = opts.reg == "l1" ? RegularizerKind::L1 : RegularizerKind::L1MinusL2;

  std::vector<std::string> solvers = opts.solvers;
  if (solvers.empty()) {
    solvers = reg == RegularizerKind::L1
                  ? std::vector<std::string>{"fista", "apg", "frprox", "prprox", "hsprox", "dyprox"}
                  : std::vector<std::string>{"dca", "apg", "fista", "frprox"};
  }
  for (const auto& name : solvers) {
    if (!sparse_registry().count(name)) {
      throw UsageError("sparse: unknown solver '" + name + "'; valid: " + known_names(sparse_registry()));
    }
    if (name == "dca" && reg != RegularizerKind::L1MinusL2) {
      throw UsageError("sparse: dca requires --reg l12");
    }
  }

  const bool lambda_auto = opts.lambda == "auto";
  if (lambda_auto && opts.mode != "random") {
    throw UsageError("sparse: --lambda auto is only available in random mode");
  }
  double lambda = lambda_auto ? 1.0 : parse_positive(opts.lambda, "sparse: --lambda");
  const bool delta_sweep = opts.delta == "sweep";
  const double fixed_delta = delta_sweep ? 0.0 : parse_positive(opts.delta, "sparse: --delta");

  const fs::path out_dir = resolve_out_dir(opts.out_dir, "out-sparse");
  fs::create_directories(out_dir);

  ProblemRecipe recipe;
  recipe.family = opts.mode == "constructed" ? ProblemFamily::SparseConstructed
                                             : ProblemFamily::SparseRandom;
  recipe.rows = opts.rows;
  recipe.cols = opts.cols;
  recipe.sparsity = opts.sparsity;
  recipe.snr_db = opts.snr_db;
  recipe.lambda = lambda;
  recipe.seed = opts.seed;
  recipe.reg = reg;

  SparseInstance instance;
  try {
    instance = recipe.family == ProblemFamily::SparseConstructed
                   ? make_sparse_instance_with_retries(recipe, 20)
                   : make_sparse_instance(recipe);
  } catch (const std::runtime_error& e) {
    throw GenerationError(e.what());
  }

  SweepResult lambda_sweep;
  if (lambda_auto) {
    lambda_sweep = tune_lambda(instance.A, instance.b, reg, instance.x_star, opts.iters);
    lambda = lambda_sweep.chosen;
    instance.recipe.lambda = lambda;
    recipe.lambda = lambda;
  }
  const CompositeProblem problem = instance.problem();

  if (!opts.dump_instance.empty()) save_instance(instance, opts.dump_instance);

  json summary;
  summary["instance"] = {{"rows", opts.rows},
                         {"cols", opts.cols},
                         {"sparsity", opts.sparsity},
                         {"mode", opts.mode},
                         {"reg", opts.reg},
                         {"lambda", lambda},
                         {"seed", opts.seed},
                         {"effective_seed", instance.effective_seed},
                         {"recipe_hash", fnv1a(instance.recipe.describe())}};
  if (opts.mode == "random") {
    summary["instance"]["measured_snr_db"] = measured_snr(instance.A * instance.x_star, instance.b);
  }

  std::vector<Trace> traces;
  for (const auto& name : solvers) {
    const SparseSolverChoice& choice = sparse_registry().at(name);
    double delta = fixed_delta;
    json solver_json;
    if (delta_sweep) {
      CompositeSolverSpec sweep_spec;
      sweep_spec.algorithm = choice.algorithm;
      sweep_spec.momentum = choice.momentum;
      sweep_spec.max_iters = opts.iters;
      sweep_spec.inner_max = opts.inner_max;
      const SweepResult sweep = tune_delta(problem, sweep_spec, Vector::Zero(problem.cols()));
      delta = sweep.chosen;
      json grid = json::array();
      for (const SweepOutcome& o : sweep.outcomes) {
        grid.push_back({{"delta", o.delta},
                        {"final_objective", o.final_objective},
                        {"convergent", o.convergent}});
      }
      solver_json["sweep"] = std::move(grid);
    }
    Trace t = run_sparse_solver(problem, choice, delta, opts.iters, 0.0, opts.record_every,
                                opts.inner_max);
    t.label = name;
    t.problem_hash = std::to_string(fnv1a(instance.recipe.describe()));
    write_trace_csv(t, out_dir / (name + ".csv"));

    solver_json["delta"] = delta;
    solver_json["final_objective"] = t.final_row().objective;
    if (t.final_row().rel_error) solver_json["final_rel_error"] = *t.final_row().rel_error;
    solver_json["iterations"] = t.final_row().iter;
    solver_json["diverged"] = t.diverged();
    summary["solvers"][name] = std::move(solver_json);
    traces.push_back(std::move(t));
  }

  render_svg_plot(traces, TraceColumn::RelError, out_dir / "rel_error.svg", true);
  render_svg_plot(traces, TraceColumn::Objective, out_dir / "objective.svg", true);
  write_text_atomic(out_dir / "summary.json", summary.dump(2) + "\n");

  json echo;
  echo["command"] = "sparse";
  echo["rows"] = opts.rows;
  echo["cols"] = opts.cols;
  echo["sparsity"] = opts.sparsity;
  echo["reg"] = opts.reg;
  echo["mode"] = opts.mode;
  echo["snr_db"] = opts.snr_db;
  echo["lambda_flag"] = opts.lambda;
  echo["lambda"] = lambda;
  echo["delta_flag"] = opts.delta;
  echo["solvers"] = solvers;
  echo["seed"] = opts.seed;
  echo["effective_seed"] = instance.effective_seed;
  echo["iters"] = opts.iters;
  echo["record_every"] = opts.record_every;
  echo["inner_max"] = opts.inner_max;
  echo["out_dir"] = out_dir.string();
  write_text_atomic(out_dir / "config-echo.json", echo.dump(2) + "\n");
  return kExitOk;
}

int cmd_verify_bound(const VerifyBoundOptions& opts) {
  if (opts.n < 2) throw UsageError("verify-bound: --n must be at least 2");
  if (opts.iters <= 0) throw UsageError("verify-bound: --iters must be positive");

  const fs::path out_dir = resolve_out_dir(opts.out_dir, "out-verify-bound");
  fs::create_directories(out_dir);

  Matrix a;
  if (opts.inject_singular) {
    // rank n-1 PSD matrix, deliberately failing the strict-SPD precondition
    const Matrix g = gaussian_sensing_matrix(opts.n, opts.n - 1, derive_seed(opts.seed, kMatrixStream));
    const Matrix gg = g * g.transpose();
    a = ((gg + gg.transpose()) * 0.5).eval();
  } else {
    a = random_spd_matrix(opts.n, derive_seed(opts.seed, kMatrixStream));
  }
  const Vector b = gaussian_vector(opts.n, derive_seed(opts.seed, kRhsStream));
  const QuadraticProblem problem(a, b);

  double alpha;
  if (opts.alpha == "auto") {
    alpha = 1.0 / svd_spectrum(a).spectral_norm();
  } else {
    alpha = parse_positive(opts.alpha, "verify-bound: --alpha");
  }

  SmoothSolverSpec spec;
  spec.algorithm = SmoothAlgorithm::FRGD;
  spec.step = StepMode::fixed(alpha);
  spec.max_iters = opts.iters;
  std::vector<Vector> iterates;
  run_smooth(problem, spec, Vector::Zero(opts.n), &iterates);

  BoundReport report;
  try {
    report = verify_convergence_bound(problem, iterates, alpha);
  } catch (const std::invalid_argument& e) {
    throw GenerationError(e.what());
  }

  std::string csv = "l,lhs,k_l,k_l_stmt,rhs,holds,z_rank\n";
  for (const BoundRow& r : report.rows) {
    csv += std::to_string(r.l) + ',' + format_double(r.lhs) + ',' + format_double(r.k_l) + ',' +
           format_double(r.k_l_stmt) + ',' + format_double(r.rhs) + ',' + (r.holds ? "1" : "0") +
           ',' + std::to_string(r.z_rank) + '\n';
  }
  write_text_atomic(out_dir / "bound.csv", csv);

  json echo;
  echo["command"] = "verify-bound";
  echo["n"] = opts.n;
  echo["seed"] = opts.seed;
  echo["alpha_flag"] = opts.alpha;
  echo["alpha"] = alpha;
  echo["iters"] = opts.iters;
  echo["kappa_A"] = report.kappa_A;
  echo["spectral_norm_A"] = report.spectral_norm_A;
  echo["rho"] = report.rho;
  echo["rows_verified"] = report.rows.size();
  echo["all_hold"] = report.all_hold();
  echo["out_dir"] = out_dir.string();
  write_text_atomic(out_dir / "config-echo.json", echo.dump(2) + "\n");

  return report.all_hold() ? kExitOk : kExitViolation;
}

int cmd_plot(const PlotOptions& opts) {
  if (opts.inputs.empty()) throw UsageError("plot: at least one input CSV is required");
  TraceColumn column;
  try {
    column = parse_trace_column(opts.column);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<Trace> traces;
  for (const auto& input : opts.inputs) {
    try {
      traces.push_back(read_trace_csv(input));
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
  }
  try {
    render_svg_plot(traces, column, opts.out, opts.log_scale);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

}  // namespace cgmom::bench
