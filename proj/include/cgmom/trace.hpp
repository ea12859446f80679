#pragma once

#include "cgmom/linalg.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cgmom {

namespace flag {
inline constexpr const char* kBetaFallback = "beta_fallback";
inline constexpr const char* kDegenerateDirection = "degenerate_direction";
inline constexpr const char* kDiverged = "diverged";
inline constexpr const char* kBudgetExhausted = "budget_exhausted";
}  // namespace flag

struct TraceRow {
  long iter = 0;
  double objective = 0.0;
  std::optional<double> rel_error;
  double norm = 0.0;  // gradient norm (smooth runs) or iterate-change norm (composite runs)
  std::optional<double> alpha;
  std::optional<double> beta;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
};

struct Trace {
  std::string label;
  std::vector<TraceRow> rows;

  // metadata; not part of the CSV schema
  std::string problem_hash;
  std::string spec_echo;
  double wall_seconds = 0.0;

  bool diverged() const;
  bool has_flag(const std::string& f) const;
  const TraceRow& final_row() const;
};

/// ||x - x_star||_2 / ||x_star||_2. Requires a nonzero ground truth.
double relative_error(const Vector& x, const Vector& x_star);

/// Signal-to-noise ratio in dB: 20*log10(||clean|| / ||noisy - clean||).
double measured_snr(const Vector& clean, const Vector& noisy);

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

/// CSV with header `iter,objective,rel_error,norm,alpha,beta,flags`; empty
/// fields for absent optionals; multiple flags joined with ';'. The file is
/// written to a temp path and renamed into place.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Parses a file written by write_trace_csv (lossless round-trip).
Trace read_trace_csv(const std::filesystem::path& path);

/// FNV-1a hash of a string, for problem-recipe fingerprints in metadata.
std::uint64_t fnv1a(const std::string& text);

}  // namespace cgmom
