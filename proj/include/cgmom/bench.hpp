#pragma once

#include "cgmom/composite.hpp"
#include "cgmom/problems.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgmom::bench {

// Exit-code contract: 0 success, 1 property violation, 2 usage error,
// 3 generation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGeneration = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The delta / lambda tuning grid {1e-4, 1e-3, ..., 1e1}.
std::vector<double> decade_grid();

struct QuadOptions {
  int n = 500;
  double alpha = 0.3;
  double gdm_beta = 0.9;
  long iters = 3000;
  long record_every = 1;
  bool uncentered = false;
  std::vector<std::string> solvers;  // empty -> all eight fx/ls variants
  std::string out_dir;
};

struct SparseOptions {
  Index rows = 256;
  Index cols = 1024;
  Index sparsity = 5;
  std::string reg = "l1";          // l1 | l12
  std::string mode = "constructed";  // constructed | random
  double snr_db = 30.0;
  std::string lambda = "0.1";  // positive number | auto (random mode only)
  std::string delta = "sweep";  // positive number | sweep
  std::vector<std::string> solvers;  // empty -> per-regularizer default set
  std::uint64_t seed = 1;
  long iters = 3000;
  long record_every = 1;
  long inner_max = 200;
  std::string out_dir;
  std::string dump_instance;  // optional path for the instance JSON
};

struct VerifyBoundOptions {
  int n = 50;
  std::uint64_t seed = 2;
  std::string alpha = "auto";  // auto -> 1/||A||_2
  long iters = 30;
  bool inject_singular = false;  // debug: force the SPD precondition failure
  std::string out_dir;
};

struct PlotOptions {
  std::vector<std::string> inputs;
  std::string column = "objective";
  std::string out = "plot.svg";
  bool log_scale = true;
};

int cmd_quad(const QuadOptions& opts);
int cmd_sparse(const SparseOptions& opts);
int cmd_verify_bound(const VerifyBoundOptions& opts);
int cmd_plot(const PlotOptions& opts);

/// Picks delta from the decade grid: smallest final objective among runs that
/// stayed finite and did not end above their starting objective; ties go to
/// the smaller delta. Returns the chosen delta and the per-delta outcomes.
struct SweepOutcome {
  double delta = 0.0;
  double final_objective = 0.0;
  bool convergent = false;
};
struct SweepResult {
  double chosen = 0.0;
  bool any_convergent = false;
  std::vector<SweepOutcome> outcomes;
};
SweepResult tune_delta(const CompositeProblem& problem, CompositeSolverSpec spec, const Vector& x0);

/// The lambda selection protocol for random instances: FR momentum-prox at
/// delta = 1e-3 over the decade grid, smallest final objective wins.
SweepResult tune_lambda(const Matrix& a, const Vector& b, RegularizerKind reg,
                        const Vector& ground_truth, long iters);

}  // namespace cgmom::bench
