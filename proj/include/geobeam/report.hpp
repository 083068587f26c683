#pragma once

#include <optional>
#include <string>
#include <vector>

namespace geobeam::cli {

struct ReportRow {
  std::string experiment;
  int d = 3;
  int p = 1;
  std::string l;  // dash-joined numerators, e.g. "1-2"
  int k = 0;
  std::string observable;
  double value = 0.0;
  std::optional<double> reference;

  std::optional<double> abs_error() const;

  bool operator==(const ReportRow&) const = default;
};

// CSV with the fixed header
//   experiment,d,p,l,k,observable,value,reference,abs_error
// floats at 17 significant digits, empty fields for absent references.
std::string to_csv(const std::vector<ReportRow>& rows);
// JSON array of row objects with the same keys (null for absent fields).
std::string to_json(const std::vector<ReportRow>& rows);

std::vector<ReportRow> parse_csv(const std::string& text);
std::vector<ReportRow> parse_json(const std::string& text);

// Writes in the requested format ("csv" | "json"); empty path = stdout.
// Throws IoError on filesystem failure.
void emit(const std::vector<ReportRow>& rows, const std::string& format,
          const std::string& path);

}  // namespace geobeam::cli
