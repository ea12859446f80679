#include "cgmom/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

namespace cgmom {

namespace {

constexpr double kLogFloor = 1e-16;
constexpr double kWidth = 820.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 70.0, kRight = 170.0, kTop = 24.0, kBottom = 44.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::optional<double> column_value(const TraceRow& r, TraceColumn c) {
  switch (c) {
    case TraceColumn::Objective: return r.objective;
    case TraceColumn::RelError: return r.rel_error;
    case TraceColumn::Norm: return r.norm;
  }
  return std::nullopt;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

const char* trace_column_name(TraceColumn c) {
  switch (c) {
    case TraceColumn::Objective: return "objective";
    case TraceColumn::RelError: return "rel_error";
    case TraceColumn::Norm: return "norm";
  }
  return "?";
}

TraceColumn parse_trace_column(const std::string& name) {
  if (name == "objective") return TraceColumn::Objective;
  if (name == "rel_error") return TraceColumn::RelError;
  if (name == "norm") return TraceColumn::Norm;
  throw std::invalid_argument("unknown column '" + name +
                              "' (expected objective, rel_error or norm)");
}

void render_svg_plot(const std::vector<Trace>& traces, TraceColumn column,
                     const std::filesystem::path& path, bool log_y) {
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Series> series;
  bool clamped = false;

  for (const Trace& t : traces) {
    Series s;
    s.label = t.label;
    for (const TraceRow& r : t.rows) {
      auto v = column_value(r, column);
      if (!v || !std::isfinite(*v)) continue;
      double y = *v;
      if (log_y && y < kLogFloor) {
        y = kLogFloor;
        clamped = true;
      }
      s.points.emplace_back(static_cast<double>(r.iter), log_y ? std::log10(y) : y);
    }
    if (!s.points.empty()) series.push_back(std::move(s));
  }

  if (series.empty()) {
    std::string available;
    for (TraceColumn c : {TraceColumn::Objective, TraceColumn::RelError, TraceColumn::Norm}) {
      for (const Trace& t : traces) {
        bool any = std::any_of(t.rows.begin(), t.rows.end(), [&](const TraceRow& r) {
          auto v = column_value(r, c);
          return v && std::isfinite(*v);
        });
        if (any) {
          if (!available.empty()) available += ", ";
          available += trace_column_name(c);
          break;
        }
      }
    }
    throw std::invalid_argument(std::string("no data for column '") + trace_column_name(column) +
                                "'; columns with data: " + (available.empty() ? "none" : available));
  }

  double xmin = series[0].points[0].first, xmax = xmin;
  double ymin = series[0].points[0].second, ymax = ymin;
  for (const Series& s : series) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\""
      << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " " << fmt(kHeight) << "\">\n";
  svg << "<title>" << trace_column_name(column) << (log_y ? " (log scale)" : "")
      << (clamped ? "; nonpositive values clamped to 1e-16" : "") << "</title>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\""
      << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(kTop + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
      << "\" y2=\"" << fmt(kTop + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double ty = ymin + (ymax - ymin) * i / n_ticks;
    const double py = sy(ty);
    svg << "<line x1=\"" << fmt(kLeft - 4) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(py) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
        << (log_y ? "1e" + fmt(ty) : fmt(ty)) << "</text>\n";
    const double tx = xmin + (xmax - xmin) * i / n_ticks;
    const double px = sx(tx);
    svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << fmt(kTop + plot_h + 4) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" << fmt(tx)
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 8)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">iteration</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].points.size(); ++i) {
      if (i) svg << ' ';
      svg << fmt(sx(series[k].points[i].first)) << ',' << fmt(sy(series[k].points[i].second));
    }
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(k);
    svg << "<line x1=\"" << fmt(kLeft + plot_w + 12) << "\" y1=\"" << fmt(ly + 4) << "\" x2=\""
        << fmt(kLeft + plot_w + 34) << "\" y2=\"" << fmt(ly + 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(kLeft + plot_w + 40) << "\" y=\"" << fmt(ly + 8)
        << "\" font-family=\"monospace\" font-size=\"12\">" << series[k].label << "</text>\n";
  }
  svg << "</svg>\n";

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << svg.str();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
}

}  // namespace cgmom
