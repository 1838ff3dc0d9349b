// amcomp: simulate, design, fit and check shape-deformation experiments.
//
//   amcomp simulate --config sim.json --seed 7 --out runs/sim
//   amcomp design   --seed 7 --out runs/design
//   amcomp fit      --data runs/sim/dataset.csv --variant baseline --out runs/fit
//   amcomp check    --draws runs/fit/draws.csv --experiment runs/exp/dataset.csv --out runs/check
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "amcomp/convergence.hpp"
#include "amcomp/design.hpp"
#include "amcomp/diagnostics.hpp"
#include "amcomp/fit.hpp"
#include "amcomp/io.hpp"
#include "amcomp/plot.hpp"
#include "amcomp/random.hpp"
#include "amcomp/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace amcomp;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string variant;
};

struct RunContext {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  fs::path out;
  std::vector<std::string> artifacts;

  fs::path artifact(const std::string& name) {
    artifacts.push_back(name);
    return out / name;
  }
};

/// Config file merged with flag overrides. Flags win.
RunContext make_context(const std::string& command, const CommonOptions& opts, const json& overrides) {
  RunContext ctx;
  ctx.command = command;
  ctx.config = opts.config.empty() ? json::object() : read_json(opts.config);
  if (!ctx.config.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : overrides.items()) ctx.config[k] = v;
  if (opts.seed) ctx.config["seed"] = *opts.seed;
  if (!opts.variant.empty()) ctx.config["variant"] = opts.variant;
  if (!ctx.config.contains("seed")) ctx.config["seed"] = 0;
  ctx.seed = ctx.config["seed"].get<std::uint64_t>();
  ctx.out = opts.out;
  fs::create_directories(ctx.out);
  return ctx;
}

void write_manifest(RunContext& ctx) {
  json m;
  m["command"] = ctx.command;
  m["config"] = ctx.config;
  m["config_hash"] = fnv1a_hex(ctx.config.dump());
  m["seed"] = ctx.seed;
  m["artifacts"] = ctx.artifacts;
  write_json(ctx.out / "manifest.json", m);
}

template <typename T>
std::vector<T> get_list(const json& cfg, const char* key, std::vector<T> fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  if (!it->is_array()) throw ConfigError(std::string("'") + key + "' must be an array");
  return it->get<std::vector<T>>();
}

std::string design_file(double r0) { return "design_r" + radius_label(r0) + ".json"; }

ModelParams refined_from_simple(const ModelParams& simple, int harmonics) {
  ModelParams p = simple;
  p.variant = Variant::kRefinedInterference;
  for (double lam : simple.lambda) {
    RefinedRadiusParams rp;
    rp.lambda1 = rp.lambda2 = lam;
    rp.delta_cos.assign(static_cast<std::size_t>(harmonics), 0.0);
    rp.delta_sin.assign(static_cast<std::size_t>(harmonics), 0.0);
    p.refined.push_back(rp);
  }
  p.lambda.clear();
  return p;
}

int cmd_simulate(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const std::string scenario = cfg.value("scenario", "baseline");
  ScenarioSpec spec;
  if (scenario == "baseline") {
    spec = ScenarioSpec::reference_baseline(ctx.seed);
  } else if (scenario == "experiment") {
    spec = ScenarioSpec::reference_experiment(ctx.seed);
  } else {
    throw ConfigError("scenario must be 'baseline' or 'experiment'");
  }
  spec.radii = get_list<double>(cfg, "radii", spec.radii);
  spec.points = get_list<std::size_t>(cfg, "points", spec.points);
  const int harmonics = cfg.value("harmonics", 3);
  if (cfg.contains("params")) spec.params = params_from_json(cfg["params"]);
  if (cfg.contains("variant")) {
    const Variant v = parse_variant(cfg["variant"].get<std::string>());
    if (v == Variant::kRefinedInterference && spec.params.variant == Variant::kSimpleInterference) {
      spec.params = refined_from_simple(spec.params, harmonics);
    }
    spec.params.variant = v;
  }
  if (spec.params.variant != Variant::kBaseline && spec.params.variant != Variant::kNoInterference &&
      spec.params.radii != spec.radii) {
    throw ConfigError("interference parameters must be given for exactly the simulated radii");
  }
  for (const auto& h : cfg.value("roughness", json::array())) {
    spec.roughness.push_back({h.at("k").get<int>(), h.at("amplitude").get<double>()});
  }
  if (spec.scenario == Scenario::kExperiment) {
    spec.designs.clear();
    const auto dir = cfg.value("designs", std::string());
    for (std::size_t i = 0; i < spec.radii.size(); ++i) {
      const double r = spec.radii[i];
      spec.designs[r] = dir.empty()
                            ? generate_design(derive_seed(ctx.seed, 0x100 + i), SectionLayout(16), default_unit_size(r), r)
                            : design_from_json(read_json(fs::path(dir) / design_file(r)));
    }
  }
  const DeformationDataset data = simulate(spec);
  write_dataset_csv(ctx.artifact("dataset.csv"), data);
  for (const auto& [r, d] : data.designs) write_json(ctx.artifact(design_file(r)), design_to_json(d));
  std::cout << "simulated " << data.size() << " units on " << spec.radii.size() << " cylinders\n";
  return kOk;
}

int cmd_design(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto radii = get_list<double>(cfg, "radii", reference_radii());
  std::vector<double> units;
  for (double r : radii) units.push_back(default_unit_size(r));
  units = get_list<double>(cfg, "unit_sizes", units);
  if (units.size() != radii.size()) throw ConfigError("need one unit size per radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto d = generate_design(derive_seed(ctx.seed, 0x100 + i), SectionLayout(16), units[i], radii[i]);
    const fs::path path = ctx.artifact(design_file(radii[i]));
    write_json(path, design_to_json(d));
    const auto back = design_from_json(read_json(path));
    std::cout << "r0 = " << radius_label(radii[i]) << ": levels";
    for (int l : back.levels) std::cout << ' ' << l;
    std::cout << '\n';
  }
  return kOk;
}

ChainConfig chain_config(const json& cfg, std::uint64_t seed) {
  ChainConfig cc;
  const json c = cfg.value("sampler", json::object());
  cc.n_draws = c.value("draws", cc.n_draws);
  cc.burn_in = c.value("burn_in", cc.burn_in);
  cc.n_chains = c.value("chains", cc.n_chains);
  cc.algorithm = parse_algorithm(c.value("algorithm", std::string(to_string(cc.algorithm))));
  cc.step_size = c.value("step_size", cc.step_size);
  cc.leapfrog_steps = c.value("leapfrog_steps", cc.leapfrog_steps);
  cc.adapt = c.value("adapt", cc.adapt);
  cc.seed = seed;
  cc.validate();
  return cc;
}

int cmd_fit(RunContext& ctx) {
  const auto& cfg = ctx.config;
  if (!cfg.contains("data")) throw ConfigError("fit needs a dataset ('data' or --data)");
  const DeformationDataset data = read_dataset_csv(fs::path(cfg["data"].get<std::string>()));
  const Variant variant = parse_variant(cfg.value("variant", std::string("baseline")));
  const int harmonics = cfg.value("harmonics", 3);
  const double interval = cfg.value("interval", 0.95);
  const ChainConfig cc = chain_config(cfg, ctx.seed);

  const ModelSpec spec = spec_for(data, variant, harmonics);
  const FitResult result = fit(data, spec, cc);
  if (!result.laplace.converged) std::cerr << "warning: mode search did not converge\n";

  write_draws_csv(ctx.artifact("draws.csv"), to_table(result.draws));
  const auto summary = summarize(result.draws, interval);
  write_json(ctx.artifact("summary.json"), summary_to_json(summary, result.draws, variant, interval));

  std::printf("%-14s %12s %12s %12s %12s %12s %8s %7s\n", "parameter", "mean", "sd", "median", "lower", "upper", "ess",
              "rhat");
  for (const auto& s : summary) {
    std::printf("%-14s %12.5g %12.5g %12.5g %12.5g %12.5g %8.0f %7.4f\n", s.name.c_str(), s.mean, s.sd, s.median,
                s.lower, s.upper, s.ess, s.rhat);
  }
  return kOk;
}

int cmd_check(RunContext& ctx) {
  const auto& cfg = ctx.config;
  if (!cfg.contains("draws")) throw ConfigError("check needs baseline draws ('draws' or --draws)");
  if (!cfg.contains("experiment")) throw ConfigError("check needs an experiment dataset ('experiment' or --experiment)");
  const DrawTable table = read_draws_csv(fs::path(cfg["draws"].get<std::string>()));
  const DeformationDataset experiment = read_dataset_csv(fs::path(cfg["experiment"].get<std::string>()));
  const double level = cfg.value("band_level", 0.99);
  const double interval = cfg.value("interval", 0.95);
  const auto draws = baseline_draws(table);

  const auto bands = predictive_bands(draws, experiment, level, derive_seed(ctx.seed, 0x62616e64ull));
  const auto verdicts = classify_interference(experiment, bands);
  const auto rows = verdict_rows(experiment, bands, verdicts);
  const auto effects = estimate_effective_treatments(experiment, draws, interval);

  write_verdicts_csv(ctx.artifact("verdicts.csv"), rows);
  write_effective_treatment_csv(ctx.artifact("effective_treatment.csv"), effects);
  write_band_table(ctx.artifact("bands.dat"), rows);
  write_effective_treatment_table(ctx.artifact("effective_treatment.dat"), effects);
  if (cfg.value("svg", false)) {
    for (double r : experiment.radii()) write_svg(ctx.artifact("band_r" + radius_label(r) + ".svg"), band_chart(rows, r));
  }

  json per_cylinder = json::object();
  for (double r : experiment.radii()) {
    std::vector<InterferenceVerdict> sub;
    for (std::size_t i = 0; i < experiment.size(); ++i) {
      if (experiment.observations[i].r0 == r) sub.push_back(verdicts[i]);
    }
    per_cylinder[radius_label(r)] = negligible_fraction(sub);
  }
  const double overall = negligible_fraction(verdicts);
  write_json(ctx.artifact("check_summary.json"), json{{"band_level", level},
                                                      {"units", experiment.size()},
                                                      {"negligible_fraction", overall},
                                                      {"negligible_fraction_by_radius", per_cylinder}});
  std::cout << "negligible fraction " << overall << " over " << experiment.size() << " units\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape-deformation compensation experiments"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string data_path, draws_path, experiment_path;
  auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Top-level seed");
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--variant", opts.variant, "baseline | no-interference | simple-interference | refined-interference");
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset");
  auto* design_cmd = app.add_subcommand("design", "Draw restricted Latin square designs");
  auto* fit_cmd = app.add_subcommand("fit", "Sample the posterior of a model");
  auto* check_cmd = app.add_subcommand("check", "Posterior predictive interference check");
  for (auto* sub : {simulate_cmd, design_cmd, fit_cmd, check_cmd}) add_common(sub);
  fit_cmd->add_option("--data", data_path, "Dataset CSV");
  check_cmd->add_option("--draws", draws_path, "Draws CSV from a baseline fit");
  check_cmd->add_option("--experiment", experiment_path, "Experiment dataset CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    json overrides = json::object();
    if (!data_path.empty()) overrides["data"] = data_path;
    if (!draws_path.empty()) overrides["draws"] = draws_path;
    if (!experiment_path.empty()) overrides["experiment"] = experiment_path;
    const std::string name = app.get_subcommands().front()->get_name();
    RunContext ctx = make_context(name, opts, overrides);
    int rc = kOk;
    if (name == "simulate") rc = cmd_simulate(ctx);
    if (name == "design") rc = cmd_design(ctx);
    if (name == "fit") rc = cmd_fit(ctx);
    if (name == "check") rc = cmd_check(ctx);
    write_manifest(ctx);
    return rc;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
