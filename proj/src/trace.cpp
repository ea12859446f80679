#include "cgmom/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace cgmom {

bool TraceRow::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

bool Trace::diverged() const { return has_flag(flag::kDiverged); }

bool Trace::has_flag(const std::string& f) const {
  return std::any_of(rows.begin(), rows.end(), [&](const TraceRow& r) { return r.has_flag(f); });
}

const TraceRow& Trace::final_row() const {
  if (rows.empty()) throw std::runtime_error("trace '" + label + "' has no rows");
  return rows.back();
}

double relative_error(const Vector& x, const Vector& x_star) {
  const double denom = x_star.norm();
  if (denom == 0.0) throw std::invalid_argument("relative_error: ground truth is zero");
  return (x - x_star).norm() / denom;
}

double measured_snr(const Vector& clean, const Vector& noisy) {
  const double noise = (noisy - clean).norm();
  if (noise == 0.0) throw std::invalid_argument("measured_snr: noise is zero");
  return 20.0 * std::log10(clean.norm() / noise);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, ptr);
}

namespace {

constexpr const char* kCsvHeader = "iter,objective,rel_error,norm,alpha,beta,flags";

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad numeric field '" + s + "' in " + path.string());
  }
  return v;
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << kCsvHeader << '\n';
    for (const TraceRow& r : trace.rows) {
      out << r.iter << ',' << format_double(r.objective) << ',';
      if (r.rel_error) out << format_double(*r.rel_error);
      out << ',' << format_double(r.norm) << ',';
      if (r.alpha) out << format_double(*r.alpha);
      out << ',';
      if (r.beta) out << format_double(*r.beta);
      out << ',' << join_flags(r.flags) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("unexpected CSV header in " + path.string());
  }
  Trace trace;
  trace.label = path.stem().string();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 7) {
      throw std::runtime_error("malformed CSV row in " + path.string());
    }
    TraceRow row;
    row.iter = static_cast<long>(parse_double(fields[0], path));
    row.objective = parse_double(fields[1], path);
    if (!fields[2].empty()) row.rel_error = parse_double(fields[2], path);
    row.norm = parse_double(fields[3], path);
    if (!fields[4].empty()) row.alpha = parse_double(fields[4], path);
    if (!fields[5].empty()) row.beta = parse_double(fields[5], path);
    if (!fields[6].empty()) row.flags = split(fields[6], ';');
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace cgmom
