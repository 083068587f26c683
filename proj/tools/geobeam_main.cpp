#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geobeam/config.hpp"
#include "geobeam/experiments.hpp"
#include "geobeam/report.hpp"

namespace {

using geobeam::cli::ExperimentConfig;
using geobeam::cli::ExperimentKind;

struct Flags {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string group;
  std::string geodesics;
  std::string weights;
  std::string degrees;
  int d = -1;
  int resolution = -1;
  int degree_cap = -1;
  std::int64_t seed = -1;
  std::int64_t dict_seed = -1;
};

void add_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "configuration file");
  cmd->add_option("--out", flags.out_path, "output path (default stdout)");
  cmd->add_option("--format", flags.format, "csv | json");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--d", flags.d, "sphere dimension (odd)");
  cmd->add_option("--group", flags.group, "'trivial' or 'p:l1,l2,...'");
  cmd->add_option("--geodesics", flags.geodesics,
                  "comma-separated: gamma:j or frame:u1 u2 ../v1 v2 ..");
  cmd->add_option("--weights", flags.weights, "comma-separated atom weights");
  cmd->add_option("--degrees", flags.degrees, "comma-separated degree schedule");
  cmd->add_option("--dict-seed", flags.dict_seed, "dictionary seed override");
  cmd->add_option("--resolution", flags.resolution,
                  "geodesic grid resolution per sphere factor");
  cmd->add_option("--degree-cap", flags.degree_cap, "maximum allowed degree");
}

// Flags override config-file keys; the merge reuses the config parser so the
// two spellings cannot drift apart.
ExperimentConfig merge(ExperimentKind kind, const Flags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty())
    config = geobeam::cli::load_config(flags.config_path);
  config.kind = kind;

  std::string overrides;
  if (flags.d >= 0) overrides += "d = " + std::to_string(flags.d) + "\n";
  if (!flags.group.empty()) overrides += "group = " + flags.group + "\n";
  if (!flags.geodesics.empty())
    overrides += "geodesics = " + flags.geodesics + "\n";
  if (!flags.weights.empty()) overrides += "weights = " + flags.weights + "\n";
  if (!flags.degrees.empty()) overrides += "degrees = " + flags.degrees + "\n";
  if (flags.seed >= 0) overrides += "seed = " + std::to_string(flags.seed) + "\n";
  if (flags.dict_seed >= 0)
    overrides += "dict_seed = " + std::to_string(flags.dict_seed) + "\n";
  if (flags.resolution >= 0)
    overrides += "resolution = " + std::to_string(flags.resolution) + "\n";
  if (flags.degree_cap >= 0)
    overrides += "degree_cap = " + std::to_string(flags.degree_cap) + "\n";
  if (!flags.format.empty()) overrides += "format = " + flags.format + "\n";
  if (!flags.out_path.empty()) overrides += "out = " + flags.out_path + "\n";

  if (!overrides.empty()) {
    ExperimentConfig patch = geobeam::cli::parse_config(overrides);
    if (flags.d >= 0) config.d = patch.d;
    if (!flags.group.empty()) {
      config.p = patch.p;
      config.l = patch.l;
    }
    if (!flags.geodesics.empty()) config.geodesics = patch.geodesics;
    if (!flags.weights.empty()) config.weights = patch.weights;
    if (!flags.degrees.empty()) config.degrees = patch.degrees;
    if (flags.seed >= 0) config.master_seed = patch.master_seed;
    if (flags.dict_seed >= 0) config.dict_seed = patch.dict_seed;
    if (flags.resolution >= 0) config.resolution = patch.resolution;
    if (flags.degree_cap >= 0) config.degree_cap = patch.degree_cap;
    if (!flags.format.empty()) config.format = patch.format;
    if (!flags.out_path.empty()) config.out_path = patch.out_path;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geobeam: eigenfunction concentration experiments on odd spheres"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, ExperimentKind>> kinds = {
      {"beam-converge", ExperimentKind::BeamConverge},
      {"average", ExperimentKind::Average},
      {"realize", ExperimentKind::Realize},
      {"lens-spectrum", ExperimentKind::LensSpectrum},
      {"verify", ExperimentKind::Verify},
  };

  std::vector<Flags> flag_sets(kinds.size());
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(kinds[i].first);
    add_flags(cmd, flag_sets[i]);
    commands.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (!commands[i]->parsed()) continue;
    try {
      const ExperimentConfig config = merge(kinds[i].second, flag_sets[i]);
      geobeam::cli::validate(config);
      const geobeam::cli::RunResult result = geobeam::cli::run(config);
      geobeam::cli::emit(result.rows, config.format, config.out_path);
      return result.exit_code;
    } catch (const geobeam::cli::ConfigError& e) {
      std::cerr << "config-error: " << e.what() << "\n";
      return 1;
    } catch (const geobeam::cli::InfeasibleError& e) {
      std::cerr << "infeasible: " << e.what() << "\n";
      return 2;
    } catch (const geobeam::cli::IoError& e) {
      std::cerr << "io-error: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
