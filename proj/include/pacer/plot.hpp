#pragma once

#include <optional>
#include <string>

#include "pacer/io.hpp"

namespace pacer {

// Two stacked panels, power and velocity against distance, with an optional
// baseline ride overlaid.
std::string render_plan_svg(const PlotSeries& plan, const std::optional<PlotSeries>& baseline);

}  // namespace pacer
