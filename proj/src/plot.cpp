#include "amcomp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace amcomp {
namespace {

std::ofstream open_table(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string num(double v) {
  if (!std::isfinite(v)) return "NaN";
  return format_double(v);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_band_table(const std::filesystem::path& path, std::span<const VerdictRow> rows) {
  auto out = open_table(path);
  out << "# r0 theta observed lower mean upper substantial\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i > 0 && rows[i - 1].r0 != r.r0) out << "\n\n";
    out << num(r.r0) << ' ' << num(r.theta.radians()) << ' ' << num(r.deformation) << ' ' << num(r.band_lower) << ' '
        << num(r.band_mean) << ' ' << num(r.band_upper) << ' '
        << (r.verdict == InterferenceClass::kSubstantial ? 1 : 0) << '\n';
  }
}

void write_effective_treatment_table(const std::filesystem::path& path,
                                     std::span<const EffectiveTreatmentEstimate> rows) {
  auto out = open_table(path);
  out << "# r0 theta assigned g_mean g_lower g_upper weight\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i > 0 && rows[i - 1].r0 != r.r0) out << "\n\n";
    out << num(r.r0) << ' ' << num(r.theta.radians()) << ' ' << num(r.assigned) << ' ' << num(r.mean) << ' '
        << num(r.lower) << ' ' << num(r.upper) << ' '
        << num(r.weight ? *r.weight : std::numeric_limits<double>::quiet_NaN()) << '\n';
  }
}

std::string render_svg(const SvgChart& chart) {
  constexpr double left = 70, right = 20, top = 40, bottom = 50;
  const double w = chart.width, h = chart.height;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  const auto py = [&](double y) { return h - bottom - (y - ymin) / (ymax - ymin) * (h - top - bottom); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fixed(w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(chart.title)
      << "</text>\n";
  svg << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(w - left - right)
      << "\" height=\"" << fixed(h - top - bottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    svg << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(h - bottom + 16) << "\" text-anchor=\"middle\">"
        << tick_label(xv) << "</text>\n";
    svg << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\">"
        << tick_label(yv) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(w / 2) << "\" y=\"" << fixed(h - 10) << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
  svg << "<text transform=\"translate(14," << fixed(h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.points) {
      svg << "<g fill=\"" << s.color << "\">\n";
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\"" << fixed(py(s.y[i])) << "\" r=\"1.5\"/>\n";
      }
      svg << "</g>\n";
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i])) << ' ';
      }
      svg << "\"/>\n";
    }
    svg << "<text x=\"" << fixed(w - right - 6) << "\" y=\"" << fixed(top + 16 + 14 * static_cast<double>(k))
        << "\" text-anchor=\"end\" fill=\"" << s.color << "\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::filesystem::path& path, const SvgChart& chart) {
  auto out = open_table(path);
  out << render_svg(chart);
}

SvgChart band_chart(std::span<const VerdictRow> rows, double r0) {
  SvgChart chart;
  chart.title = "Predictive band, r0 = " + radius_label(r0) + " in";
  chart.x_label = "theta (rad)";
  chart.y_label = "deformation (in)";
  SvgSeries obs{"observed", {}, {}, "#444444", true};
  SvgSeries lo{"lower", {}, {}, "#d62728", false};
  SvgSeries mid{"mean", {}, {}, "#1f77b4", false};
  SvgSeries hi{"upper", {}, {}, "#d62728", false};
  for (const auto& r : rows) {
    if (r.r0 != r0) continue;
    const double t = r.theta.radians();
    obs.x.push_back(t);
    obs.y.push_back(r.deformation);
    for (auto* s : {&lo, &mid, &hi}) s->x.push_back(t);
    lo.y.push_back(r.band_lower);
    mid.y.push_back(r.band_mean);
    hi.y.push_back(r.band_upper);
  }
  chart.series = {obs, lo, mid, hi};
  return chart;
}

}  // namespace amcomp
