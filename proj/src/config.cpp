#include "geobeam/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "geobeam/groups.hpp"
#include "geobeam/rng.hpp"

namespace geobeam::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + what + ": '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + what + ": '" + s + "'");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

GeodesicSpec parse_geodesic(const std::string& text) {
  if (text.rfind("gamma:", 0) == 0) {
    return GeodesicSpec::gamma(
        static_cast<int>(parse_int(text.substr(6), "geodesic index")));
  }
  if (text.rfind("frame:", 0) == 0) {
    const std::vector<std::string> halves = split(text.substr(6), '/');
    if (halves.size() != 2)
      throw ConfigError("frame geodesic needs 'frame:u1 u2 .../v1 v2 ...'");
    std::vector<double> u, v;
    for (const std::string& c : split(halves[0], ' '))
      if (!c.empty()) u.push_back(parse_double(c, "frame coordinate"));
    for (const std::string& c : split(halves[1], ' '))
      if (!c.empty()) v.push_back(parse_double(c, "frame coordinate"));
    return GeodesicSpec::frame(std::move(u), std::move(v));
  }
  throw ConfigError("geodesic must be 'gamma:j' or 'frame:.../...': '" + text +
                    "'");
}

std::string serialize_geodesic(const GeodesicSpec& g) {
  if (g.standard) return "gamma:" + std::to_string(g.index);
  std::string out = "frame:";
  for (std::size_t i = 0; i < g.frame_u.size(); ++i) {
    if (i) out += ' ';
    out += format_double(g.frame_u[i]);
  }
  out += '/';
  for (std::size_t i = 0; i < g.frame_v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(g.frame_v[i]);
  }
  return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::BeamConverge: return "beam-converge";
    case ExperimentKind::Average: return "average";
    case ExperimentKind::Realize: return "realize";
    case ExperimentKind::LensSpectrum: return "lens-spectrum";
    case ExperimentKind::Verify: return "verify";
  }
  throw ConfigError("unknown experiment kind");
}

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "beam-converge") return ExperimentKind::BeamConverge;
  if (name == "average") return ExperimentKind::Average;
  if (name == "realize") return ExperimentKind::Realize;
  if (name == "lens-spectrum") return ExperimentKind::LensSpectrum;
  if (name == "verify") return ExperimentKind::Verify;
  throw ConfigError("unknown experiment '" + name + "'");
}

GeodesicSpec GeodesicSpec::gamma(int j) {
  GeodesicSpec g;
  g.standard = true;
  g.index = j;
  return g;
}

GeodesicSpec GeodesicSpec::frame(std::vector<double> u, std::vector<double> v) {
  GeodesicSpec g;
  g.standard = false;
  g.index = 0;
  g.frame_u = std::move(u);
  g.frame_v = std::move(v);
  return g;
}

std::uint64_t ExperimentConfig::effective_dict_seed() const {
  return dict_seed ? *dict_seed : derive_seed(master_seed, "dictionary");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::map<std::string, bool> seen;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value': '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen[key]) throw ConfigError("duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "experiment") {
      config.kind = experiment_from_string(value);
    } else if (key == "d") {
      config.d = static_cast<int>(parse_int(value, "d"));
    } else if (key == "group") {
      if (value == "trivial") {
        config.p = 1;
        config.l.clear();
      } else {
        const std::vector<std::string> halves = split(value, ':');
        if (halves.size() != 2)
          throw ConfigError("group must be 'trivial' or 'p:l1,l2,...'");
        config.p = static_cast<int>(parse_int(halves[0], "group order"));
        config.l.clear();
        for (const std::string& c : split(halves[1], ','))
          config.l.push_back(static_cast<int>(parse_int(c, "group numerator")));
      }
    } else if (key == "geodesics") {
      config.geodesics.clear();
      for (const std::string& g : split(value, ','))
        config.geodesics.push_back(parse_geodesic(g));
    } else if (key == "weights") {
      config.weights.clear();
      for (const std::string& w : split(value, ','))
        config.weights.push_back(parse_double(w, "weight"));
    } else if (key == "degrees") {
      config.degrees.clear();
      for (const std::string& k : split(value, ','))
        config.degrees.push_back(static_cast<int>(parse_int(k, "degree")));
    } else if (key == "seed") {
      const long long v = parse_int(value, "seed");
      if (v < 0) throw ConfigError("seed must be nonnegative");
      config.master_seed = static_cast<std::uint64_t>(v);
    } else if (key == "dict_seed") {
      const long long v = parse_int(value, "dict_seed");
      if (v < 0) throw ConfigError("dict_seed must be nonnegative");
      config.dict_seed = static_cast<std::uint64_t>(v);
    } else if (key == "resolution") {
      config.resolution = static_cast<int>(parse_int(value, "resolution"));
    } else if (key == "degree_cap") {
      config.degree_cap = static_cast<int>(parse_int(value, "degree_cap"));
    } else if (key == "out") {
      config.out_path = value;
    } else if (key == "format") {
      config.format = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "experiment = " << to_string(config.kind) << "\n";
  out << "d = " << config.d << "\n";
  if (config.p == 1 && config.l.empty()) {
    out << "group = trivial\n";
  } else {
    out << "group = " << config.p << ":";
    for (std::size_t i = 0; i < config.l.size(); ++i) {
      if (i) out << ",";
      out << config.l[i];
    }
    out << "\n";
  }
  if (!config.geodesics.empty()) {
    out << "geodesics = ";
    for (std::size_t i = 0; i < config.geodesics.size(); ++i) {
      if (i) out << ", ";
      out << serialize_geodesic(config.geodesics[i]);
    }
    out << "\n";
  }
  if (!config.weights.empty()) {
    out << "weights = ";
    for (std::size_t i = 0; i < config.weights.size(); ++i) {
      if (i) out << ",";
      out << format_double(config.weights[i]);
    }
    out << "\n";
  }
  if (!config.degrees.empty()) {
    out << "degrees = ";
    for (std::size_t i = 0; i < config.degrees.size(); ++i) {
      if (i) out << ",";
      out << config.degrees[i];
    }
    out << "\n";
  }
  out << "seed = " << config.master_seed << "\n";
  if (config.dict_seed) out << "dict_seed = " << *config.dict_seed << "\n";
  out << "resolution = " << config.resolution << "\n";
  out << "degree_cap = " << config.degree_cap << "\n";
  if (!config.out_path.empty()) out << "out = " << config.out_path << "\n";
  out << "format = " << config.format << "\n";
  return out.str();
}

void validate(const ExperimentConfig& config) {
  if (config.d < 3 || config.d % 2 == 0)
    throw ConfigError("d must be odd and >= 3");
  const int n = (config.d + 1) / 2;

  std::vector<int> l = config.l;
  if (l.empty()) l.assign(n, 1);
  if (static_cast<int>(l.size()) != n)
    throw ConfigError("group needs exactly (d+1)/2 numerators");
  try {
    groups::StandardGroupSpec spec(config.p, l);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid group spec: ") + e.what());
  }

  if (config.degree_cap < 1) throw ConfigError("degree_cap must be positive");
  for (int k : config.degrees) {
    if (k < 0) throw ConfigError("degrees must be nonnegative");
    if (k > config.degree_cap)
      throw ConfigError("degree " + std::to_string(k) +
                        " exceeds degree_cap " + std::to_string(config.degree_cap));
  }

  if (config.resolution < 2 || config.resolution > 4096)
    throw ConfigError("resolution out of range [2, 4096]");
  if (config.format != "csv" && config.format != "json")
    throw ConfigError("format must be csv or json");
  if (config.master_seed > (1ull << 53))
    throw ConfigError("seed must fit in 53 bits");

  for (const GeodesicSpec& g : config.geodesics) {
    if (g.standard) {
      if (g.index < 1 || g.index > n)
        throw ConfigError("gamma index out of range [1, (d+1)/2]");
    } else {
      if (static_cast<int>(g.frame_u.size()) != config.d + 1 ||
          static_cast<int>(g.frame_v.size()) != config.d + 1)
        throw ConfigError("frame vectors need d+1 coordinates");
    }
  }

  const bool needs_geodesic = config.kind == ExperimentKind::BeamConverge ||
                              config.kind == ExperimentKind::Average ||
                              config.kind == ExperimentKind::Realize;
  if (needs_geodesic && config.geodesics.empty())
    throw ConfigError("experiment needs at least one geodesic");
  const bool needs_degrees = config.kind != ExperimentKind::Verify;
  if (needs_degrees && config.degrees.empty())
    throw ConfigError("experiment needs a degree schedule");

  if (config.kind == ExperimentKind::Realize) {
    if (config.weights.size() != config.geodesics.size())
      throw ConfigError("realize needs one weight per geodesic");
    double total = 0.0;
    for (double w : config.weights) {
      if (w <= 0.0) throw ConfigError("weights must be positive");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw ConfigError("weights must sum to 1");
  } else if (!config.weights.empty()) {
    throw ConfigError("weights are only valid for realize");
  }

  const bool needs_grid = config.kind == ExperimentKind::BeamConverge ||
                          config.kind == ExperimentKind::Realize ||
                          config.kind == ExperimentKind::Verify;
  if (needs_grid && config.d != 3)
    throw ConfigError("geodesic-space experiments require d = 3");
}

}  // namespace geobeam::cli
