#pragma once

// File formats: income CSV input, minimum-wage config, CSV series outputs
// with an embedded run manifest, and JSON result records.
//
// Income CSV:   header `year,income`, one row per individual; lines starting
//               with '#' are comments.
// Config JSON:  {"x_d_fraction": 0.5,
//                "years": {"2019": {"minimum_wage": 24240, "x_t": 1.787}}}
//               where "x_t" (normalized units) is optional and pins the threshold.
// Output CSV:   `# manifest: {...}` and `# units: ...` comment rows, then a
//               header row and data rows. Numbers use the shortest decimal
//               form that round-trips to the same double.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "gpcycle/empirical.hpp"
#include "gpcycle/errors.hpp"
#include "gpcycle/fitting.hpp"
#include "gpcycle/goodwin.hpp"
#include "gpcycle/gpd.hpp"

namespace gpcycle::io {

inline constexpr std::string_view kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> arguments;  ///< full command line after the program name
  std::string tool_version{kToolVersion};

  json to_json() const {
    json j;
    j["tool"] = "gpcycle";
    j["tool_version"] = tool_version;
    j["subcommand"] = subcommand;
    j["inputs"] = inputs;
    j["config"] = config;
    j["output_dir"] = output_dir;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["arguments"] = arguments;
    return j;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, const std::string& where) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (field.empty() || res.ec != std::errc() || res.ptr != end) {
    throw DataError(where + ": cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

inline bool is_comment_or_blank(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

inline void expect_header(std::string_view line, const std::vector<std::string_view>& names, const std::string& where) {
  const auto fields = split(line);
  bool ok = fields.size() == names.size();
  for (std::size_t i = 0; ok && i < names.size(); ++i) ok = fields[i] == names[i];
  if (!ok) {
    std::string expected;
    for (std::size_t i = 0; i < names.size(); ++i) expected += (i ? "," : "") + std::string(names[i]);
    throw DataError(where + ": expected header '" + expected + "', got '" + std::string(trim(line)) + "'");
  }
}

}  // namespace detail

/// Parses `year,income` rows into one sample per year (values in file order).
inline std::map<int, IncomeSample> read_income_csv(std::istream& in, const std::string& source = "<input>") {
  std::map<int, IncomeSample> years;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (detail::is_comment_or_blank(line)) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!header_seen) {
      detail::expect_header(line, {"year", "income"}, where);
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(line);
    if (fields.size() != 2) throw DataError(where + ": expected 2 fields, got " + std::to_string(fields.size()));
    const int year = detail::parse_number<int>(fields[0], where);
    const double income = detail::parse_number<double>(fields[1], where);
    if (!(income >= 0.0) || !std::isfinite(income)) throw DataError(where + ": income must be finite and nonnegative");
    auto& s = years[year];
    s.year = year;
    s.values.push_back(income);
  }
  if (!header_seen) throw DataError(source + ": missing 'year,income' header");
  if (years.empty()) throw DataError(source + ": no income rows");
  return years;
}

inline std::map<int, IncomeSample> read_income_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_income_csv(in, path.string());
}

struct RunConfig {
  double x_d_fraction = 0.5;
  std::map<int, YearConfig> years;
  std::map<int, double> fixed_x_t;

  const YearConfig& year(int y) const {
    const auto it = years.find(y);
    if (it == years.end()) throw DataError("config has no minimum wage for year " + std::to_string(y));
    return it->second;
  }
};

inline RunConfig parse_config(const json& j, const std::string& source = "<config>") {
  RunConfig cfg;
  try {
    if (j.contains("x_d_fraction")) cfg.x_d_fraction = j.at("x_d_fraction").get<double>();
    if (j.contains("years")) {
      for (const auto& [key, entry] : j.at("years").items()) {
        const int year = detail::parse_number<int>(key, source + ": years");
        YearConfig yc{year, entry.at("minimum_wage").get<double>(), cfg.x_d_fraction};
        if (entry.contains("x_d_fraction")) yc.x_d_fraction = entry.at("x_d_fraction").get<double>();
        yc.validate();
        cfg.years[year] = yc;
        if (entry.contains("x_t")) cfg.fixed_x_t[year] = entry.at("x_t").get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
  return cfg;
}

inline RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.string());
}

/// CSV table with manifest and units comment rows.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> header, std::string units) : header_(std::move(header)), units_(std::move(units)) {}

  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void write(std::ostream& out, const RunManifest& manifest) const {
    out << "# manifest: " << manifest.to_json().dump() << '\n';
    out << "# units: " << units_ << '\n';
    write_row(out, header_);
    for (const auto& r : rows_) write_row(out, r);
  }

  void write(const std::filesystem::path& path, const RunManifest& manifest) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write(out, manifest);
  }

 private:
  static void write_row(std::ostream& out, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }

  std::vector<std::string> header_;
  std::string units_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline json params_to_json(const GpdParams& p) {
  json j;
  j["x_t"] = p.x_t();
  j["eta"] = p.eta();
  j["b"] = p.b();
  j["alpha"] = p.alpha();
  j["pareto_scale"] = p.pareto_scale();
  return j;
}

inline GpdParams params_from_json(const json& j) {
  try {
    return GpdParams::make(j.at("x_t").get<double>(), j.at("eta").get<double>(), j.at("b").get<double>(),
                           j.at("alpha").get<double>());
  } catch (const json::exception& e) {
    throw DataError(std::string("parameter record: ") + e.what());
  }
}

inline json lv_to_json(const LvCoefficients& c) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["a1"] = c.a1;
  j["b1"] = c.b1;
  j["a2"] = c.a2;
  j["b2"] = c.b2;
  j["u_c"] = num(c.u_c);
  j["v_c"] = num(c.v_c);
  j["T"] = num(c.T);
  j["r1_fit_rss"] = c.r1_fit_rss;
  j["r2_fit_rss"] = c.r2_fit_rss;
  return j;
}

/// `year,u,v` in percent.
inline UvSeries read_uv_csv(std::istream& in, const std::string& source = "<uv>") {
  UvSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_comment_or_blank(line)) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!header_seen) {
      detail::expect_header(line, {"year", "u", "v"}, where);
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(line);
    if (fields.size() != 3) throw DataError(where + ": expected 3 fields, got " + std::to_string(fields.size()));
    series.push_back({detail::parse_number<int>(fields[0], where), detail::parse_number<double>(fields[1], where),
                      detail::parse_number<double>(fields[2], where)});
  }
  if (!header_seen) throw DataError(source + ": missing 'year,u,v' header");
  return series;
}

inline UvSeries read_uv_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_uv_csv(in, path.string());
}

}  // namespace gpcycle::io
