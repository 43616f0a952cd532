#pragma once

#include <string>
#include <vector>

namespace spinodal {

/// One plotted series: either a polyline through (x, y) pairs or a scatter of
/// small circles. Data is drawn in the order given.
struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f6feb";
  bool points = false;
};

/// Writes a minimal standalone SVG chart: framed plot area, autoscaled axes
/// with min/max labels, one element per series. Output bytes depend only on
/// the arguments, so repeated runs produce identical files.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, int width = 640,
                    int height = 440);

}  // namespace spinodal
