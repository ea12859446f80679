#pragma once

#include "cgmom/trace.hpp"

namespace cgmom {

enum class TraceColumn { Objective, RelError, Norm };

const char* trace_column_name(TraceColumn c);
TraceColumn parse_trace_column(const std::string& name);  // throws on unknown name

/// Renders one polyline per trace into a standalone SVG 1.1 line chart with a
/// legend of trace labels. With log_y the y axis is log10 and nonpositive
/// values are clamped to 1e-16 (noted in the chart title). Output bytes are a
/// pure function of the inputs. Throws if no trace has data in the requested
/// column, listing the columns that do.
void render_svg_plot(const std::vector<Trace>& traces, TraceColumn column,
                     const std::filesystem::path& path, bool log_y);

}  // namespace cgmom
