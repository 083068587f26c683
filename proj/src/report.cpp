#include "geobeam/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "geobeam/config.hpp"

namespace geobeam::cli {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_field(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos)
    throw IoError("report field contains a separator: '" + s + "'");
}

}  // namespace

std::optional<double> ReportRow::abs_error() const {
  if (!reference) return std::nullopt;
  return std::abs(value - *reference);
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "experiment,d,p,l,k,observable,value,reference,abs_error\n";
  for (const ReportRow& r : rows) {
    check_field(r.experiment);
    check_field(r.l);
    check_field(r.observable);
    out << r.experiment << ',' << r.d << ',' << r.p << ',' << r.l << ',' << r.k
        << ',' << r.observable << ',' << format_double(r.value) << ',';
    if (r.reference) out << format_double(*r.reference);
    out << ',';
    if (const auto err = r.abs_error()) out << format_double(*err);
    out << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json array = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    nlohmann::json obj;
    obj["experiment"] = r.experiment;
    obj["d"] = r.d;
    obj["p"] = r.p;
    obj["l"] = r.l;
    obj["k"] = r.k;
    obj["observable"] = r.observable;
    obj["value"] = r.value;
    if (r.reference)
      obj["reference"] = *r.reference;
    else
      obj["reference"] = nullptr;
    if (const auto err = r.abs_error())
      obj["abs_error"] = *err;
    else
      obj["abs_error"] = nullptr;
    array.push_back(std::move(obj));
  }
  return array.dump(2) + "\n";
}

std::vector<ReportRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw IoError("empty CSV report");
  if (line != "experiment,d,p,l,k,observable,value,reference,abs_error")
    throw IoError("unexpected CSV header: '" + line + "'");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 9) throw IoError("malformed CSV row: '" + line + "'");
    ReportRow r;
    r.experiment = fields[0];
    r.d = std::stoi(fields[1]);
    r.p = std::stoi(fields[2]);
    r.l = fields[3];
    r.k = std::stoi(fields[4]);
    r.observable = fields[5];
    r.value = std::stod(fields[6]);
    if (!fields[7].empty()) r.reference = std::stod(fields[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ReportRow> parse_json(const std::string& text) {
  const nlohmann::json array = nlohmann::json::parse(text);
  std::vector<ReportRow> rows;
  for (const nlohmann::json& obj : array) {
    ReportRow r;
    r.experiment = obj.at("experiment").get<std::string>();
    r.d = obj.at("d").get<int>();
    r.p = obj.at("p").get<int>();
    r.l = obj.at("l").get<std::string>();
    r.k = obj.at("k").get<int>();
    r.observable = obj.at("observable").get<std::string>();
    r.value = obj.at("value").get<double>();
    if (!obj.at("reference").is_null())
      r.reference = obj.at("reference").get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit(const std::vector<ReportRow>& rows, const std::string& format,
          const std::string& path) {
  const std::string payload = format == "json" ? to_json(rows) : to_csv(rows);
  if (path.empty()) {
    std::cout << payload;
    if (!std::cout) throw IoError("failed to write report to stdout");
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  out << payload;
  out.flush();
  if (!out) throw IoError("failed to write report to '" + path + "'");
}

}  // namespace geobeam::cli
