#include "spinodal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "spinodal/common.hpp"

namespace spinodal {
namespace {

constexpr double kMarginLeft = 56.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 36.0;
constexpr double kMarginBottom = 40.0;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return std::string(buf);
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, int width,
                    int height) {
  require(width >= 160 && height >= 120, ErrorKind::domain,
          "svg: canvas too small");
  require(!series.empty(), ErrorKind::domain, "svg: no series to plot");

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  std::size_t total = 0;
  for (const SvgSeries& s : series) {
    require(s.x.size() == s.y.size(), ErrorKind::shape_mismatch,
            "svg: series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      require(std::isfinite(s.x[i]) && std::isfinite(s.y[i]), ErrorKind::domain,
              "svg: nonfinite sample");
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      ++total;
    }
  }
  require(total >= 1, ErrorKind::domain, "svg: all series empty");
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double padx = 0.04 * (xmax - xmin);
  const double pady = 0.04 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;

  const double plot_w = width - kMarginLeft - kMarginRight;
  const double plot_h = height - kMarginTop - kMarginBottom;
  const auto px = [&](double x) {
    return kMarginLeft + plot_w * (x - xmin) / (xmax - xmin);
  };
  const auto py = [&](double y) {
    return kMarginTop + plot_h * (ymax - y) / (ymax - ymin);
  };

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  out << "<rect x=\"" << fmt("%.2f", kMarginLeft) << "\" y=\""
      << fmt("%.2f", kMarginTop) << "\" width=\"" << fmt("%.2f", plot_w)
      << "\" height=\"" << fmt("%.2f", plot_h)
      << "\" fill=\"none\" stroke=\"#24292f\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << fmt("%.2f", kMarginLeft) << "\" y=\"22\" "
      << "font-family=\"monospace\" font-size=\"14\">" << title << "</text>\n";
  out << "<text x=\"" << fmt("%.2f", kMarginLeft) << "\" y=\""
      << fmt("%.2f", height - 12.0)
      << "\" font-family=\"monospace\" font-size=\"11\">" << fmt("%.4g", xmin)
      << "</text>\n";
  out << "<text x=\"" << fmt("%.2f", kMarginLeft + plot_w - 48.0) << "\" y=\""
      << fmt("%.2f", height - 12.0)
      << "\" font-family=\"monospace\" font-size=\"11\">" << fmt("%.4g", xmax)
      << "</text>\n";
  out << "<text x=\"4\" y=\"" << fmt("%.2f", kMarginTop + plot_h)
      << "\" font-family=\"monospace\" font-size=\"11\">" << fmt("%.4g", ymin)
      << "</text>\n";
  out << "<text x=\"4\" y=\"" << fmt("%.2f", kMarginTop + 10.0)
      << "\" font-family=\"monospace\" font-size=\"11\">" << fmt("%.4g", ymax)
      << "</text>\n";

  for (const SvgSeries& s : series) {
    if (s.x.empty()) continue;
    if (s.points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << "<circle cx=\"" << fmt("%.2f", px(s.x[i])) << "\" cy=\""
            << fmt("%.2f", py(s.y[i])) << "\" r=\"2.5\" fill=\"" << s.color
            << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i > 0) out << ' ';
        out << fmt("%.2f", px(s.x[i])) << ',' << fmt("%.2f", py(s.y[i]));
      }
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
  if (!out) fail(ErrorKind::io, "svg: write failed for " + path);
}

}  // namespace spinodal
