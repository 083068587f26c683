#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geobeam::cli {

// Exit-code-bearing error categories of the command-line tool.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { BeamConverge, Average, Realize, LensSpectrum, Verify };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

// A geodesic referenced from a config: either the standard circle gamma_j or
// an explicit frame (orthonormalized on load).
struct GeodesicSpec {
  bool standard = true;
  int index = 1;
  std::vector<double> frame_u;
  std::vector<double> frame_v;

  static GeodesicSpec gamma(int j);
  static GeodesicSpec frame(std::vector<double> u, std::vector<double> v);

  bool operator==(const GeodesicSpec&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Verify;
  int d = 3;
  // Group: p = 1 with all-ones l is the trivial group, serialized "trivial".
  int p = 1;
  std::vector<int> l;
  std::vector<GeodesicSpec> geodesics;
  std::vector<double> weights;  // realize targets; empty elsewhere
  std::vector<int> degrees;
  std::uint64_t master_seed = 42;
  std::optional<std::uint64_t> dict_seed;  // derived from the master when unset
  int resolution = 64;
  int degree_cap = 256;
  std::string out_path;        // empty: stdout
  std::string format = "csv";  // csv | json

  bool operator==(const ExperimentConfig&) const = default;

  std::uint64_t effective_dict_seed() const;
};

// Flat key = value text with comma-separated arrays; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Lossless round trip: parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// Structural validation (group spec arithmetic, degree cap, weights, ...).
// Throws ConfigError.
void validate(const ExperimentConfig& config);

}  // namespace geobeam::cli
