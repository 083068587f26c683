#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "geobeam/config.hpp"
#include "geobeam/experiments.hpp"
#include "geobeam/report.hpp"

using namespace geobeam::cli;

namespace {

ExperimentConfig sample_config() {
  ExperimentConfig config;
  config.kind = ExperimentKind::BeamConverge;
  config.d = 3;
  config.p = 5;
  config.l = {1, 2};
  config.geodesics = {GeodesicSpec::gamma(1),
                      GeodesicSpec::frame({1.0, 0.0, 0.25, 0.0},
                                          {0.0, 1.0, 0.0, -0.125})};
  config.degrees = {5, 10, 15};
  config.master_seed = 42;
  config.dict_seed = 7;
  config.resolution = 16;
  config.degree_cap = 300;
  config.out_path = "rows.csv";
  config.format = "csv";
  return config;
}

}  // namespace

TEST_CASE("config survives a serialization round trip") {
  const ExperimentConfig config = sample_config();
  const ExperimentConfig back = parse_config(serialize_config(config));
  CHECK(back == config);

  // trivial group and realize weights round-trip too
  ExperimentConfig realize;
  realize.kind = ExperimentKind::Realize;
  realize.geodesics = {GeodesicSpec::gamma(1), GeodesicSpec::gamma(2)};
  realize.weights = {0.375, 0.625};
  realize.degrees = {16};
  CHECK(parse_config(serialize_config(realize)) == realize);
}

TEST_CASE("config parsing accepts comments and rejects junk") {
  const ExperimentConfig parsed = parse_config(
      "# experiment file\n"
      "experiment = lens-spectrum\n"
      "d = 3\n"
      "group = 8:3,5   # lens space\n"
      "degrees = 0,8,16\n");
  CHECK(parsed.kind == ExperimentKind::LensSpectrum);
  CHECK(parsed.p == 8);
  CHECK(parsed.l == std::vector<int>{3, 5});

  CHECK_THROWS_AS(parse_config("unknown_key = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("d 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("d = 3\nd = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = warp\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("group = 5:1,2,3:4\n"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig config = sample_config();
  CHECK_NOTHROW(validate(config));

  ExperimentConfig bad = config;
  bad.d = 4;
  CHECK_THROWS_AS(validate(bad), ConfigError);

  bad = config;
  bad.l = {2, 1};  // gcd(2, 5) fine; use p = 4 to break it
  bad.p = 4;
  CHECK_THROWS_AS(validate(bad), ConfigError);

  bad = config;
  bad.degrees = {301};  // above the cap
  CHECK_THROWS_AS(validate(bad), ConfigError);

  bad = config;
  bad.format = "yaml";
  CHECK_THROWS_AS(validate(bad), ConfigError);

  bad = config;
  bad.kind = ExperimentKind::Realize;
  bad.weights = {0.5};  // must match the atom count
  CHECK_THROWS_AS(validate(bad), ConfigError);

  bad = config;
  bad.geodesics.clear();
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("CSV report format") {
  CHECK(to_csv({}) == "experiment,d,p,l,k,observable,value,reference,abs_error\n");

  ReportRow row;
  row.experiment = "average";
  row.d = 3;
  row.p = 5;
  row.l = "1-2";
  row.k = 320;
  row.observable = "avg_norm_sq";
  row.value = 0.20000000000000123;
  row.reference = 0.2;
  const std::string csv = to_csv({row});
  CHECK(csv ==
        "experiment,d,p,l,k,observable,value,reference,abs_error\n"
        "average,3,5,1-2,320,avg_norm_sq,0.20000000000000123,"
        "0.20000000000000001,1.2212453270876722e-15\n");

  // parse round trip preserves every field (17 significant digits)
  const std::vector<ReportRow> parsed = parse_csv(csv);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].experiment == row.experiment);
  CHECK(parsed[0].d == row.d);
  CHECK(parsed[0].p == row.p);
  CHECK(parsed[0].l == row.l);
  CHECK(parsed[0].k == row.k);
  CHECK(parsed[0].observable == row.observable);
  CHECK(parsed[0].value == row.value);
  REQUIRE(parsed[0].reference.has_value());
  CHECK(*parsed[0].reference == *row.reference);
}

TEST_CASE("JSON and CSV agree field by field") {
  ReportRow with_ref;
  with_ref.experiment = "realize";
  with_ref.l = "1-1";
  with_ref.k = 64;
  with_ref.observable = "husimi_mass[0]";
  with_ref.value = 0.4999999999;
  with_ref.reference = 0.5;
  ReportRow without_ref;
  without_ref.experiment = "realize";
  without_ref.l = "1-1";
  without_ref.k = 64;
  without_ref.observable = "weak_star_discrepancy";
  without_ref.value = 0.03125;

  const std::vector<ReportRow> rows = {with_ref, without_ref};
  const std::vector<ReportRow> via_csv = parse_csv(to_csv(rows));
  const std::vector<ReportRow> via_json = parse_json(to_json(rows));
  REQUIRE(via_csv.size() == via_json.size());
  for (std::size_t i = 0; i < via_csv.size(); ++i) CHECK(via_csv[i] == via_json[i]);
}

TEST_CASE("emit writes files and surfaces IO failures") {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "geobeam_report_test.csv";
  ReportRow row;
  row.experiment = "verify";
  row.l = "1-1";
  row.observable = "verify_pass";
  emit({row}, "csv", path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "experiment,d,p,l,k,observable,value,reference,abs_error");
  std::filesystem::remove(path);

  CHECK_THROWS_AS(emit({row}, "csv", "/nonexistent-dir/na/report.csv"), IoError);
}

TEST_CASE("lens-spectrum experiment reproduces the parity table") {
  ExperimentConfig config;
  config.kind = ExperimentKind::LensSpectrum;
  config.p = 2;
  config.l = {1, 1};
  config.degrees = {0, 1, 2, 3, 4, 5, 6};
  const RunResult result = run(config);
  CHECK(result.exit_code == 0);
  const std::vector<double> expected = {1, 0, 9, 0, 25, 0, 49};
  std::size_t index = 0;
  for (const ReportRow& row : result.rows) {
    if (row.observable != "invariant_dim") continue;
    REQUIRE(index < expected.size());
    CHECK(row.value == expected[index]);
    ++index;
  }
  CHECK(index == expected.size());
}

TEST_CASE("experiments are deterministic across runs and thread counts") {
  ExperimentConfig config;
  config.kind = ExperimentKind::BeamConverge;
  config.geodesics = {GeodesicSpec::gamma(1)};
  config.degrees = {8, 16, 32, 64};
  config.resolution = 16;

  setenv("GEOBEAM_THREADS", "1", 1);
  const RunResult single = run(config);
  const std::string csv_single = to_csv(single.rows);
  setenv("GEOBEAM_THREADS", "3", 1);
  const std::string csv_threaded = to_csv(run(config).rows);
  unsetenv("GEOBEAM_THREADS");
  const std::string csv_default = to_csv(run(config).rows);

  CHECK(csv_single == csv_threaded);
  CHECK(csv_single == csv_default);

  // one discrepancy row per degree, strictly decreasing
  std::vector<double> discrepancies;
  for (const ReportRow& row : single.rows)
    if (row.observable == "weak_star_discrepancy")
      discrepancies.push_back(row.value);
  REQUIRE(discrepancies.size() == 4);
  for (std::size_t i = 1; i < discrepancies.size(); ++i)
    CHECK(discrepancies[i] < discrepancies[i - 1]);
}

TEST_CASE("frame geodesics are orthonormalized with a warning row") {
  ExperimentConfig config;
  config.kind = ExperimentKind::Average;
  config.p = 2;
  config.l = {1, 1};
  config.degrees = {4};
  // deliberately non-orthonormal frame
  config.geodesics = {GeodesicSpec::frame({1.0, 0.0, 0.0, 0.0},
                                          {0.3, 1.0, 0.0, 0.0})};
  const RunResult result = run(config);
  bool warned = false;
  for (const ReportRow& row : result.rows)
    if (row.observable.rfind("frame_adjusted", 0) == 0) warned = true;
  CHECK(warned);
}

TEST_CASE("infeasible realize targets produce an error row and exit 2") {
  ExperimentConfig config;
  config.kind = ExperimentKind::Realize;
  config.p = 5;
  config.l = {1, 2};
  config.geodesics = {GeodesicSpec::gamma(1)};
  config.weights = {1.0};
  config.degrees = {7};  // not a multiple of the stabilizer order 5
  config.resolution = 8;
  const RunResult result = run(config);
  CHECK(result.exit_code == 2);
  bool error_row = false;
  for (const ReportRow& row : result.rows)
    if (row.observable.rfind("error:", 0) == 0) error_row = true;
  CHECK(error_row);
}

TEST_CASE("the verify battery passes") {
  ExperimentConfig config;
  config.kind = ExperimentKind::Verify;
  const RunResult result = run(config);
  CHECK(result.exit_code == 0);
  for (const ReportRow& row : result.rows) {
    if (row.observable == "master_seed" || row.observable == "dictionary_seed")
      continue;
    REQUIRE(row.reference.has_value());
    CHECK(row.value <= *row.reference);
  }
}
