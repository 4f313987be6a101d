// Standalone log-log convergence plot.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "expsplit/error.hpp"
#include "expsplit/harness.hpp"

namespace expsplit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
const char* const kDashes[] = {"6,4", "8,3,2,3", "2,3", "10,5"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;  // decades

  double px(double log_h) const { return kLeft + (log_h - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double log_e) const { return kTop + (y1 - log_e) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string marker(std::size_t style, double x, double y, const char* color) {
  const double r = 4.0;
  switch (style % 3) {
    case 0:
      return "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\" fill=\"" +
             color + "\"/>";
    case 1:
      return "<rect x=\"" + num(x - r) + "\" y=\"" + num(y - r) + "\" width=\"" + num(2 * r) +
             "\" height=\"" + num(2 * r) + "\" fill=\"" + color + "\"/>";
    default:
      return "<polygon points=\"" + num(x) + "," + num(y - r) + " " + num(x - r) + "," +
             num(y + r) + " " + num(x + r) + "," + num(y + r) + "\" fill=\"" + color + "\"/>";
  }
}

}  // namespace

std::string render_svg_loglog(const ConvergenceReport& report, std::span<const double> guide_slopes) {
  if (report.series.empty()) throw Error(ErrorCode::InvalidArgument, "plot: report has no schemes");
  double hmin = std::numeric_limits<double>::infinity();
  double hmax = -hmin;
  double emin = hmin;
  double emax = -hmin;
  for (const auto& s : report.series) {
    for (const auto& p : s.points) {
      if (!(p.error > 0.0)) continue;
      hmin = std::min(hmin, p.h);
      hmax = std::max(hmax, p.h);
      emin = std::min(emin, p.error);
      emax = std::max(emax, p.error);
    }
  }
  if (!(hmin <= hmax)) throw Error(ErrorCode::InvalidArgument, "plot: no positive errors");

  Frame f{std::floor(std::log10(hmin)), std::ceil(std::log10(hmax)), std::floor(std::log10(emin)),
          std::ceil(std::log10(emax))};
  if (f.x1 == f.x0) f.x1 += 1.0;
  if (f.y1 == f.y0) f.y1 += 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<title>" + escape(report.problem + " / " + report.norm.display_name()) + "</title>\n";
  svg += "<defs><clipPath id=\"plot-area\"><rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) +
         "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) + "\"/></clipPath></defs>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double d = f.x0; d <= f.x1 + 1e-9; d += 1.0) {
    const double x = f.px(d);
    svg += "<line class=\"tick\" x1=\"" + num(x) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" +
           num(x) + "\" y2=\"" + num(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + plot_h + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\">1e" + num(d) + "</text>\n";
  }
  for (double d = f.y0; d <= f.y1 + 1e-9; d += 1.0) {
    const double y = f.py(d);
    svg += "<line class=\"tick\" x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(kLeft) + "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">1e" + num(d) + "</text>\n";
  }
  svg += "<text class=\"xlabel\" x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" font-size=\"14\" text-anchor=\"middle\">step size h</text>\n";
  svg += "<text class=\"ylabel\" x=\"20\" y=\"" + num(kTop + plot_h / 2) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         num(kTop + plot_h / 2) + ")\">error, " + escape(report.norm.display_name()) + "</text>\n";

  // Guides pass through the rightmost point of the first series.
  const auto& first = report.series.front().points;
  const auto anchor = std::max_element(first.begin(), first.end(), [](const auto& a, const auto& b) {
    return a.h < b.h;
  });
  double legend_y = kTop + 10;
  const double legend_x = kLeft + plot_w + 15;
  if (anchor != first.end() && anchor->error > 0.0) {
    const double ax = std::log10(anchor->h);
    const double ay = std::log10(anchor->error);
    for (std::size_t g = 0; g < guide_slopes.size(); ++g) {
      const double slope = guide_slopes[g];
      const double y_left = ay + slope * (f.x0 - ax);
      svg += "<line class=\"guide\" data-slope=\"" + num(slope) + "\" x1=\"" + num(f.px(f.x0)) +
             "\" y1=\"" + num(f.py(y_left)) + "\" x2=\"" + num(f.px(ax)) + "\" y2=\"" +
             num(f.py(ay)) + "\" stroke=\"gray\" stroke-dasharray=\"" +
             kDashes[g % std::size(kDashes)] + "\" clip-path=\"url(#plot-area)\"/>\n";
      svg += "<line x1=\"" + num(legend_x) + "\" y1=\"" + num(legend_y) + "\" x2=\"" +
             num(legend_x + 25) + "\" y2=\"" + num(legend_y) + "\" stroke=\"gray\" stroke-dasharray=\"" +
             kDashes[g % std::size(kDashes)] + "\"/>\n";
      svg += "<text x=\"" + num(legend_x + 30) + "\" y=\"" + num(legend_y + 4) +
             "\" font-size=\"12\">slope " + num(slope) + "</text>\n";
      legend_y += 18;
    }
  }

  for (std::size_t s = 0; s < report.series.size(); ++s) {
    const auto& series = report.series[s];
    const char* color = kColors[s % std::size(kColors)];
    std::string pts;
    std::string marks;
    for (const auto& p : series.points) {
      if (!(p.error > 0.0)) continue;
      const double x = f.px(std::log10(p.h));
      const double y = f.py(std::log10(p.error));
      if (!pts.empty()) pts += " ";
      pts += num(x) + "," + num(y);
      marks += marker(s, x, y, color) + "\n";
    }
    const std::string name(to_string(series.scheme));
    svg += "<polyline class=\"series\" data-scheme=\"" + name + "\" points=\"" + pts +
           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    svg += marks;
    svg += marker(s, legend_x + 12, legend_y, color) + "\n";
    svg += "<text x=\"" + num(legend_x + 30) + "\" y=\"" + num(legend_y + 4) +
           "\" font-size=\"12\">" + escape(name) + " (p=" + num(std::round(series.fit.order * 100) / 100) +
           ")</text>\n";
    legend_y += 18;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace expsplit
