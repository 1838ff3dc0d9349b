#include "amcomp/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace amcomp {
namespace {

using nlohmann::json;

std::string format_theta(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  if (s == "NA" || s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw FormatError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

long parse_int(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw FormatError("line " + std::to_string(line) + ": not an integer: '" + s + "'");
  }
  return v;
}

/// Reads a header and rows of exactly header.size() fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

Table read_table(std::istream& in, const std::vector<std::string>* expected_header) {
  Table t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      if (expected_header && t.header != *expected_header) throw FormatError("unexpected CSV header: " + line);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw FormatError("line " + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                        " fields, got " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(n);
  }
  if (t.header.empty()) throw FormatError("missing CSV header");
  return t;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

const std::vector<std::string> kDatasetHeader{"cylinder_radius", "theta",
                                              "section",         "level",
                                              "compensation_inches", "deformation_inches"};

const std::vector<std::string> kVerdictHeader{"cylinder_radius", "theta",      "section",    "compensation_inches",
                                              "deformation_inches", "band_lower", "band_mean", "band_upper",
                                              "verdict",            "excess"};

const std::vector<std::string> kEffectHeader{"cylinder_radius", "theta",   "section", "assigned_inches",
                                             "own_inches",      "neighbor_inches", "g_mean", "g_lower",
                                             "g_upper",         "weight",  "ill_conditioned_draws"};

std::string_view verdict_name(InterferenceClass c) {
  return c == InterferenceClass::kNegligible ? "negligible" : "substantial";
}

double parse_radius_label(const std::string& key, std::size_t open) {
  const auto close = key.find(']', open);
  if (close == std::string::npos) throw FormatError("malformed parameter name: " + key);
  return parse_double(key.substr(open + 1, close - open - 1), 0);
}

double json_number(const json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw FormatError("missing numeric field '" + key + "'");
  return it->get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// Datasets -------------------------------------------------------------------

void write_dataset_csv(std::ostream& out, const DeformationDataset& data) {
  const SectionLayout plain(16);
  for (std::size_t i = 0; i < kDatasetHeader.size(); ++i) out << (i ? "," : "") << kDatasetHeader[i];
  out << '\n';
  for (const auto& obs : data.observations) {
    const auto it = data.designs.find(obs.r0);
    const SectionLayout& layout = it != data.designs.end() ? it->second.layout : plain;
    const std::size_t section = layout.section_of(obs.theta);
    const int level = it != data.designs.end() ? it->second.level(section) : 0;
    out << format_double(obs.r0) << ',' << format_theta(obs.theta.radians()) << ',' << section << ',' << level
        << ',' << format_double(obs.assigned_compensation) << ',' << format_double(obs.deformation) << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const DeformationDataset& data) {
  auto out = open_out(path);
  write_dataset_csv(out, data);
}

DeformationDataset read_dataset_csv(std::istream& in) {
  const Table t = read_table(in, &kDatasetHeader);
  DeformationDataset data;
  struct Partial {
    std::map<std::size_t, int> level;
    std::optional<double> unit;
    bool any_level = false;
  };
  std::map<double, Partial> partial;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& f = t.rows[k];
    const std::size_t ln = t.line_numbers[k];
    Observation obs;
    obs.r0 = parse_double(f[0], ln);
    obs.theta = Angle(parse_double(f[1], ln));
    const long section = parse_int(f[2], ln);
    const long level = parse_int(f[3], ln);
    obs.assigned_compensation = parse_double(f[4], ln);
    obs.deformation = parse_double(f[5], ln);
    if (section < 0) throw FormatError("line " + std::to_string(ln) + ": negative section");
    auto& p = partial[obs.r0];
    const auto [pos, inserted] = p.level.emplace(static_cast<std::size_t>(section), static_cast<int>(level));
    if (!inserted && pos->second != level) {
      throw FormatError("line " + std::to_string(ln) + ": section " + std::to_string(section) +
                        " has more than one level");
    }
    if (level != 0) {
      p.any_level = true;
      const double unit = obs.assigned_compensation / static_cast<double>(level);
      if (p.unit && *p.unit != unit) throw FormatError("line " + std::to_string(ln) + ": inconsistent unit size");
      p.unit = unit;
    } else if (obs.assigned_compensation != 0.0) {
      throw FormatError("line " + std::to_string(ln) + ": level 0 with non-zero compensation");
    }
    data.observations.push_back(obs);
  }
  for (const auto& [r0, p] : partial) {
    if (!p.any_level) continue;
    CompensationDesign d;
    d.nominal_radius = r0;
    d.unit_size = *p.unit;
    if (p.level.size() != d.layout.section_count() || p.level.rbegin()->first >= d.layout.section_count()) {
      throw FormatError("cylinder " + radius_label(r0) + ": every section needs at least one unit");
    }
    for (const auto& [s, level] : p.level) d.levels[s] = level;
    data.designs.emplace(r0, d);
  }
  for (const auto& obs : data.observations) {
    const auto it = data.designs.find(obs.r0);
    if (it == data.designs.end()) continue;
    if (assigned_compensation(it->second, obs.theta) != obs.assigned_compensation) {
      throw FormatError("cylinder " + radius_label(obs.r0) + ": section column disagrees with theta");
    }
  }
  return data;
}

DeformationDataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset_csv(in);
}

// Designs --------------------------------------------------------------------

nlohmann::json design_to_json(const CompensationDesign& design) {
  return json{{"nominal_radius", design.nominal_radius}, {"unit_size", design.unit_size}, {"levels", design.levels}};
}

CompensationDesign design_from_json(const nlohmann::json& j) {
  CompensationDesign d;
  d.nominal_radius = json_number(j, "nominal_radius");
  d.unit_size = json_number(j, "unit_size");
  const auto it = j.find("levels");
  if (it == j.end() || !it->is_array()) throw FormatError("missing 'levels' array");
  d.levels = it->get<std::vector<int>>();
  const auto violations = validate_design(d);
  if (!violations.empty()) throw FormatError("invalid design: " + violations.front().message);
  return d;
}

// Parameters -----------------------------------------------------------------

nlohmann::json params_to_json(const ModelParams& params, int harmonics) {
  json j;
  j["variant"] = std::string(to_string(params.variant));
  const auto& b = params.baseline;
  j["alpha"] = b.alpha;
  j["beta"] = b.beta;
  j["a"] = b.a;
  j["b"] = b.b;
  j["x0"] = b.x0;
  j["sigma"] = b.sigma;
  if (params.variant == Variant::kSimpleInterference) {
    if (params.lambda.size() != params.radii.size()) throw std::invalid_argument("need one lambda per radius");
    for (std::size_t i = 0; i < params.radii.size(); ++i) {
      j["lambda[" + radius_label(params.radii[i]) + "]"] = params.lambda[i];
    }
  } else if (params.variant == Variant::kRefinedInterference) {
    if (params.refined.size() != params.radii.size()) throw std::invalid_argument("need one block per radius");
    j["harmonics"] = harmonics;
    for (std::size_t i = 0; i < params.radii.size(); ++i) {
      const std::string tag = "[" + radius_label(params.radii[i]) + "]";
      const auto& rp = params.refined[i];
      j["lambda1" + tag] = rp.lambda1;
      j["lambda2" + tag] = rp.lambda2;
      j["delta0" + tag] = rp.delta0;
      for (int k = 1; k <= harmonics; ++k) {
        const auto idx = static_cast<std::size_t>(k - 1);
        j["delta_c" + std::to_string(k) + tag] = idx < rp.delta_cos.size() ? rp.delta_cos[idx] : 0.0;
        j["delta_s" + std::to_string(k) + tag] = idx < rp.delta_sin.size() ? rp.delta_sin[idx] : 0.0;
      }
    }
  }
  return j;
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  const auto v = j.find("variant");
  p.variant = v != j.end() && v->is_string() ? parse_variant(v->get<std::string>()) : Variant::kBaseline;
  p.baseline = {json_number(j, "alpha"), json_number(j, "beta"), json_number(j, "a"),
                json_number(j, "b"),     json_number(j, "x0"),   json_number(j, "sigma")};
  std::set<double> radii;
  for (const auto& [key, value] : j.items()) {
    if (const auto open = key.find('['); open != std::string::npos) radii.insert(parse_radius_label(key, open));
  }
  p.radii.assign(radii.begin(), radii.end());
  if (p.variant == Variant::kSimpleInterference) {
    for (double r : p.radii) p.lambda.push_back(json_number(j, "lambda[" + radius_label(r) + "]"));
  } else if (p.variant == Variant::kRefinedInterference) {
    const int harmonics = j.value("harmonics", 3);
    for (double r : p.radii) {
      const std::string tag = "[" + radius_label(r) + "]";
      RefinedRadiusParams rp;
      rp.lambda1 = json_number(j, "lambda1" + tag);
      rp.lambda2 = json_number(j, "lambda2" + tag);
      rp.delta0 = json_number(j, "delta0" + tag);
      for (int k = 1; k <= harmonics; ++k) {
        rp.delta_cos.push_back(json_number(j, "delta_c" + std::to_string(k) + tag));
        rp.delta_sin.push_back(json_number(j, "delta_s" + std::to_string(k) + tag));
      }
      p.refined.push_back(rp);
    }
  } else {
    p.radii.clear();
  }
  return p;
}

// Draws ----------------------------------------------------------------------

Eigen::Index DrawTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Eigen::Index>(i);
  }
  throw FormatError("no draws for parameter '" + name + "'");
}

DrawTable to_table(const PosteriorDraws& draws) {
  DrawTable t;
  for (const auto& p : draws.parameters) t.names.push_back(p.name);
  t.values = draws.constrained();
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    t.chain.push_back(draws.chain_of(r));
    t.iteration.push_back(draws.iteration_of(r));
  }
  return t;
}

void write_draws_csv(std::ostream& out, const DrawTable& table) {
  out << "chain,iteration";
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    out << table.chain[i] << ',' << table.iteration[i];
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) out << ',' << format_double(table.values(r, c));
    out << '\n';
  }
}

void write_draws_csv(const std::filesystem::path& path, const DrawTable& table) {
  auto out = open_out(path);
  write_draws_csv(out, table);
}

DrawTable read_draws_csv(std::istream& in) {
  const Table t = read_table(in, nullptr);
  if (t.header.size() < 2 || t.header[0] != "chain" || t.header[1] != "iteration") {
    throw FormatError("draws CSV must start with chain,iteration");
  }
  DrawTable out;
  out.names.assign(t.header.begin() + 2, t.header.end());
  out.values.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(out.names.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const std::size_t ln = t.line_numbers[r];
    out.chain.push_back(static_cast<int>(parse_int(f[0], ln)));
    out.iteration.push_back(static_cast<int>(parse_int(f[1], ln)));
    for (std::size_t c = 0; c < out.names.size(); ++c) {
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(f[c + 2], ln);
    }
  }
  return out;
}

DrawTable read_draws_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_draws_csv(in);
}

std::vector<BaselineParams<>> baseline_draws(const DrawTable& table) {
  const Eigen::Index ia = table.index_of("alpha"), ib = table.index_of("beta"), iA = table.index_of("a"),
                     iB = table.index_of("b"), ix = table.index_of("x0"), is = table.index_of("sigma");
  std::vector<BaselineParams<>> out;
  out.reserve(static_cast<std::size_t>(table.values.rows()));
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    const auto& v = table.values;
    out.push_back({v(r, ia), v(r, ib), v(r, iA), v(r, iB), v(r, ix), v(r, is)});
  }
  return out;
}

// Summaries ------------------------------------------------------------------

nlohmann::json summary_to_json(const std::vector<ParameterSummary>& summary, const PosteriorDraws& draws,
                               Variant variant, double interval) {
  json params = json::array();
  for (const auto& s : summary) {
    params.push_back({{"name", s.name},
                      {"mean", s.mean},
                      {"sd", s.sd},
                      {"median", s.median},
                      {"ci_lower", s.lower},
                      {"ci_upper", s.upper},
                      {"ess", s.ess},
                      {"rhat", s.rhat},
                      {"degenerate", s.degenerate}});
  }
  json chains = json::array();
  for (std::size_t c = 0; c < draws.n_chains; ++c) {
    json entry;
    if (c < draws.acceptance.size()) entry["acceptance_rate"] = draws.acceptance[c];
    if (c < draws.step_size.size()) entry["step_size"] = draws.step_size[c];
    if (c < draws.divergences.size()) entry["divergences"] = draws.divergences[c];
    chains.push_back(entry);
  }
  return json{{"variant", std::string(to_string(variant))},
              {"interval", interval},
              {"n_chains", draws.n_chains},
              {"n_draws", draws.n_draws},
              {"parameters", params},
              {"chains", chains}};
}

std::vector<ParameterSummary> summary_from_json(const nlohmann::json& j) {
  const auto it = j.find("parameters");
  if (it == j.end() || !it->is_array()) throw FormatError("summary has no 'parameters' array");
  std::vector<ParameterSummary> out;
  for (const auto& e : *it) {
    ParameterSummary s;
    s.name = e.at("name").get<std::string>();
    s.mean = json_number(e, "mean");
    s.sd = json_number(e, "sd");
    s.median = json_number(e, "median");
    s.lower = json_number(e, "ci_lower");
    s.upper = json_number(e, "ci_upper");
    s.ess = json_number(e, "ess");
    s.rhat = e.at("rhat").is_number() ? e.at("rhat").get<double>() : std::nan("");
    s.degenerate = e.value("degenerate", false);
    out.push_back(s);
  }
  return out;
}

// Diagnostics ----------------------------------------------------------------

std::vector<VerdictRow> verdict_rows(const DeformationDataset& experiment, std::span<const PredictiveBand> bands,
                                     std::span<const InterferenceVerdict> verdicts) {
  if (bands.size() != experiment.size() || verdicts.size() != experiment.size()) {
    throw std::invalid_argument("bands and verdicts must match the experiment");
  }
  const SectionLayout plain(16);
  std::vector<VerdictRow> out;
  out.reserve(experiment.size());
  for (std::size_t i = 0; i < experiment.size(); ++i) {
    const auto& obs = experiment.observations[i];
    const auto it = experiment.designs.find(obs.r0);
    const SectionLayout& layout = it != experiment.designs.end() ? it->second.layout : plain;
    out.push_back({obs.r0, obs.theta, layout.section_of(obs.theta), obs.assigned_compensation, obs.deformation,
                   bands[i].lower, bands[i].mean, bands[i].upper, verdicts[i].verdict, verdicts[i].excess});
  }
  return out;
}

void write_verdicts_csv(const std::filesystem::path& path, std::span<const VerdictRow> rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < kVerdictHeader.size(); ++i) out << (i ? "," : "") << kVerdictHeader[i];
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.r0) << ',' << format_theta(r.theta.radians()) << ',' << r.section << ','
        << format_double(r.compensation) << ',' << format_double(r.deformation) << ',' << format_double(r.band_lower)
        << ',' << format_double(r.band_mean) << ',' << format_double(r.band_upper) << ',' << verdict_name(r.verdict)
        << ',' << format_double(r.excess) << '\n';
  }
}

std::vector<VerdictRow> read_verdicts_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Table t = read_table(in, &kVerdictHeader);
  std::vector<VerdictRow> out;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& f = t.rows[k];
    const std::size_t ln = t.line_numbers[k];
    VerdictRow r;
    r.r0 = parse_double(f[0], ln);
    r.theta = Angle(parse_double(f[1], ln));
    r.section = static_cast<std::size_t>(parse_int(f[2], ln));
    r.compensation = parse_double(f[3], ln);
    r.deformation = parse_double(f[4], ln);
    r.band_lower = parse_double(f[5], ln);
    r.band_mean = parse_double(f[6], ln);
    r.band_upper = parse_double(f[7], ln);
    if (f[8] == "negligible") {
      r.verdict = InterferenceClass::kNegligible;
    } else if (f[8] == "substantial") {
      r.verdict = InterferenceClass::kSubstantial;
    } else {
      throw FormatError("line " + std::to_string(ln) + ": unknown verdict '" + f[8] + "'");
    }
    r.excess = parse_double(f[9], ln);
    out.push_back(r);
  }
  return out;
}

void write_effective_treatment_csv(const std::filesystem::path& path,
                                   std::span<const EffectiveTreatmentEstimate> rows) {
  auto out = open_out(path);
  const SectionLayout layout(16);
  for (std::size_t i = 0; i < kEffectHeader.size(); ++i) out << (i ? "," : "") << kEffectHeader[i];
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.r0) << ',' << format_theta(r.theta.radians()) << ',' << layout.section_of(r.theta) << ','
        << format_double(r.assigned) << ',' << format_double(r.x_own) << ',' << format_double(r.x_neighbor) << ','
        << format_double(r.mean) << ',' << format_double(r.lower) << ',' << format_double(r.upper) << ','
        << (r.weight ? format_double(*r.weight) : std::string("NA")) << ',' << r.ill_conditioned_draws << '\n';
  }
}

std::vector<EffectiveTreatmentEstimate> read_effective_treatment_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Table t = read_table(in, &kEffectHeader);
  std::vector<EffectiveTreatmentEstimate> out;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& f = t.rows[k];
    const std::size_t ln = t.line_numbers[k];
    EffectiveTreatmentEstimate e;
    e.r0 = parse_double(f[0], ln);
    e.theta = Angle(parse_double(f[1], ln));
    e.assigned = parse_double(f[3], ln);
    e.x_own = parse_double(f[4], ln);
    e.x_neighbor = parse_double(f[5], ln);
    e.mean = parse_double(f[6], ln);
    e.lower = parse_double(f[7], ln);
    e.upper = parse_double(f[8], ln);
    if (f[9] != "NA") e.weight = parse_double(f[9], ln);
    e.ill_conditioned_draws = static_cast<std::size_t>(parse_int(f[10], ln));
    out.push_back(e);
  }
  return out;
}

// Files ----------------------------------------------------------------------

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace amcomp
