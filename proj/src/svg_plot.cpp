#include "hetfuse/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hetfuse/errors.hpp"

namespace hetfuse {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 64, kRight = 160, kTop = 40, kBottom = 48;

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series,
                      const std::vector<PlotHLine>& hlines) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  for (const auto& h : hlines) ymin = std::min(ymin, h.y), ymax = std::max(ymax, h.y);
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  ymin = std::min(0.0, ymin);
  ymax += 0.05 * (ymax - ymin);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto X = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double v) { return kTop + ph - (v - ymin) / (ymax - ymin) * ph; };

  std::ofstream out(path);
  if (!out) throw Error("cannot write plot file " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";

  // Axes and ticks.
  out << "<line x1='" << kLeft << "' y1='" << kTop + ph << "' x2='" << kLeft + pw << "' y2='"
      << kTop + ph << "' stroke='black'/>\n";
  out << "<line x1='" << kLeft << "' y1='" << kTop << "' x2='" << kLeft << "' y2='" << kTop + ph
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    out << "<text x='" << X(xv) << "' y='" << kTop + ph + 18
        << "' text-anchor='middle' font-size='11'>" << fmt(xv) << "</text>\n";
    out << "<text x='" << kLeft - 6 << "' y='" << Y(yv) + 4
        << "' text-anchor='end' font-size='11'>" << fmt(yv) << "</text>\n";
    out << "<line x1='" << kLeft << "' y1='" << Y(yv) << "' x2='" << kLeft + pw << "' y2='"
        << Y(yv) << "' stroke='#dddddd' stroke-width='0.5'/>\n";
  }
  out << "<text x='" << kLeft + pw / 2 << "' y='" << kHeight - 10
      << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
  out << "<text x='16' y='" << kTop + ph / 2 << "' font-size='12' transform='rotate(-90 16 "
      << kTop + ph / 2 << ")' text-anchor='middle'>" << y_label << "</text>\n";

  for (const auto& h : hlines) {
    out << "<line x1='" << kLeft << "' y1='" << Y(h.y) << "' x2='" << kLeft + pw << "' y2='"
        << Y(h.y) << "' stroke='#888888' stroke-dasharray='6,4'/>\n";
    out << "<text x='" << kLeft + pw + 4 << "' y='" << Y(h.y) + 4 << "' font-size='11'>"
        << h.label << "</text>\n";
  }

  int ci = 0;
  double legend_y = kTop;
  for (const auto& s : series) {
    const char* color = kColors[ci % 8];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      out << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i])) << " ";
    }
    out << "'/>\n";
    out << "<line x1='" << kLeft + pw + 8 << "' y1='" << legend_y << "' x2='" << kLeft + pw + 28
        << "' y2='" << legend_y << "' stroke='" << color << "' stroke-width='2'/>\n";
    out << "<text x='" << kLeft + pw + 32 << "' y='" << legend_y + 4 << "' font-size='11'>"
        << s.label << "</text>\n";
    legend_y += 16;
    ++ci;
  }
  out << "</svg>\n";
}

}  // namespace hetfuse
