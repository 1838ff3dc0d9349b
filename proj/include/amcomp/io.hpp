#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "amcomp/convergence.hpp"
#include "amcomp/dataset.hpp"
#include "amcomp/design.hpp"
#include "amcomp/diagnostics.hpp"
#include "amcomp/model.hpp"
#include "amcomp/sampler.hpp"

namespace amcomp {

/// Malformed file or record.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest "%.17g" rendering that round-trips a double.
std::string format_double(double v);

// Datasets -------------------------------------------------------------------

/// Columns: cylinder_radius, theta, section, level, compensation_inches,
/// deformation_inches. Units without a design have level 0.
void write_dataset_csv(std::ostream& out, const DeformationDataset& data);
void write_dataset_csv(const std::filesystem::path& path, const DeformationDataset& data);

/// Reads a dataset. Designs are rebuilt per cylinder from the section and
/// level columns whenever a cylinder has any non-zero level; every section
/// must then be observed with a single level and a common unit size.
DeformationDataset read_dataset_csv(std::istream& in);
DeformationDataset read_dataset_csv(const std::filesystem::path& path);

// Designs --------------------------------------------------------------------

/// {nominal_radius, unit_size, levels: [...]}.
nlohmann::json design_to_json(const CompensationDesign& design);
/// Throws FormatError on missing keys or a design that fails validation.
CompensationDesign design_from_json(const nlohmann::json& j);

// Parameters -----------------------------------------------------------------

/// {"variant": ..., "harmonics": K, "alpha": ..., "lambda[0.5]": ...}, keyed by
/// the variant's parameter names on the constrained scale.
nlohmann::json params_to_json(const ModelParams& params, int harmonics = 3);
/// Radii are recovered from the bracketed suffixes.
ModelParams params_from_json(const nlohmann::json& j);

// Draws ----------------------------------------------------------------------

/// Draws on the constrained scale with their chain and iteration indices.
struct DrawTable {
  std::vector<std::string> names;
  std::vector<int> chain;
  std::vector<int> iteration;
  Eigen::MatrixXd values;  ///< rows x names.size()

  Eigen::Index index_of(const std::string& name) const;
};

DrawTable to_table(const PosteriorDraws& draws);

/// Columns: chain, iteration, then one column per parameter.
void write_draws_csv(std::ostream& out, const DrawTable& table);
void write_draws_csv(const std::filesystem::path& path, const DrawTable& table);
DrawTable read_draws_csv(std::istream& in);
DrawTable read_draws_csv(const std::filesystem::path& path);

/// Baseline parameters of every row. Throws FormatError if a column is missing.
std::vector<BaselineParams<>> baseline_draws(const DrawTable& table);

// Summaries ------------------------------------------------------------------

/// {"variant", "interval", "n_chains", "n_draws", "parameters": [{name, mean,
/// sd, median, ci_lower, ci_upper, ess, rhat}], "chains": [...]}.
nlohmann::json summary_to_json(const std::vector<ParameterSummary>& summary, const PosteriorDraws& draws,
                               Variant variant, double interval);
std::vector<ParameterSummary> summary_from_json(const nlohmann::json& j);

// Diagnostics ----------------------------------------------------------------

struct VerdictRow {
  double r0 = 0.0;
  Angle theta;
  std::size_t section = 0;
  double compensation = 0.0;
  double deformation = 0.0;
  double band_lower = 0.0;
  double band_mean = 0.0;
  double band_upper = 0.0;
  InterferenceClass verdict = InterferenceClass::kNegligible;
  double excess = 0.0;
};

std::vector<VerdictRow> verdict_rows(const DeformationDataset& experiment, std::span<const PredictiveBand> bands,
                                     std::span<const InterferenceVerdict> verdicts);
void write_verdicts_csv(const std::filesystem::path& path, std::span<const VerdictRow> rows);
std::vector<VerdictRow> read_verdicts_csv(const std::filesystem::path& path);

/// Empty weight is written as "NA".
void write_effective_treatment_csv(const std::filesystem::path& path,
                                   std::span<const EffectiveTreatmentEstimate> rows);
std::vector<EffectiveTreatmentEstimate> read_effective_treatment_csv(const std::filesystem::path& path);

// Files ----------------------------------------------------------------------

nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// FNV-1a 64 of a byte string, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace amcomp
