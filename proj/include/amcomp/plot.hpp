#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "amcomp/diagnostics.hpp"
#include "amcomp/io.hpp"

namespace amcomp {

/// Whitespace-delimited columns with a '#' header line, one blank line
/// between cylinders so gnuplot treats each as its own data block.
/// Columns: r0 theta observed lower mean upper substantial(0/1).
void write_band_table(const std::filesystem::path& path, std::span<const VerdictRow> rows);

/// Columns: r0 theta assigned g_mean g_lower g_upper weight (NaN if undefined).
void write_effective_treatment_table(const std::filesystem::path& path,
                                     std::span<const EffectiveTreatmentEstimate> rows);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool points = false;  ///< markers instead of a polyline
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 800;
  int height = 480;
};

/// Renders a line/scatter chart. Non-finite values are skipped.
std::string render_svg(const SvgChart& chart);
void write_svg(const std::filesystem::path& path, const SvgChart& chart);

/// Observed deformation against the predictive band for one cylinder.
SvgChart band_chart(std::span<const VerdictRow> rows, double r0);

}  // namespace amcomp
