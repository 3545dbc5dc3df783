#pragma once

// CSV ingestion of oscilloscope-style dumps and the plain-data serializations
// shared by every module (CSV with 17 significant digits, JSON objects).

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "multiscale/error.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

struct CsvLayout {
  enum class Kind { Auto, SingleColumn, TwoColumn };
  Kind kind = Kind::Auto;
  double dt = 1.0;  // used by the single-column layout only
};

/// Maximum relative deviation of any time step from the mean step.
inline constexpr double kSamplingJitterTolerance = 1e-6;

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  if (line.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return cells;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) cells.push_back(line.substr(i, j - i));
    i = j;
  }
  return cells;
}

inline bool parse_number(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace detail

/// Parses rows of numeric CSV. Comma- or whitespace-delimited; '#' lines are
/// comments; a first row with no numeric cell is taken as a header.
inline std::vector<std::vector<double>> read_numeric_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = detail::trim(view);
    if (view.empty() || view.front() == '#') continue;
    const auto cells = detail::split_cells(view);
    std::vector<double> row(cells.size());
    std::size_t numeric = 0;
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (detail::parse_number(cells[c], row[c])) ++numeric;
    if (numeric != cells.size()) {
      if (!seen_data && numeric == 0) {
        seen_data = true;  // header
        continue;
      }
      throw Error(Errc::Malformed, "non-numeric cell on line " + std::to_string(line_no));
    }
    seen_data = true;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline TimeSeries load_csv(std::istream& in, const CsvLayout& layout = {}, ChannelMeta meta = {}) {
  const auto rows = read_numeric_rows(in);
  require(rows.size() >= 2, Errc::TooShort, "CSV holds fewer than 2 rows");
  auto kind = layout.kind;
  if (kind == CsvLayout::Kind::Auto) {
    const auto width = rows.front().size();
    require(width == 1 || width == 2, Errc::Malformed, "expected 1 or 2 columns, found " + std::to_string(width));
    kind = width == 1 ? CsvLayout::Kind::SingleColumn : CsvLayout::Kind::TwoColumn;
  }
  const std::size_t width = kind == CsvLayout::Kind::SingleColumn ? 1 : 2;
  std::vector<double> samples(rows.size());
  std::vector<double> times;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == width, Errc::Malformed,
            "row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) + " cells, expected " +
                std::to_string(width));
    samples[r] = rows[r].back();
    require(std::isfinite(samples[r]), Errc::Malformed, "non-finite value in row " + std::to_string(r + 1));
    if (width == 2) times.push_back(rows[r].front());
  }
  if (width == 1) return TimeSeries(std::move(samples), layout.dt, std::move(meta));

  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  require(std::isfinite(dt) && dt > 0.0, Errc::NonUniformSampling, "time stamps are not increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    require(step > 0.0, Errc::NonUniformSampling, "time stamps not strictly increasing at row " + std::to_string(i + 1));
    require(std::abs(step - dt) <= kSamplingJitterTolerance * dt, Errc::NonUniformSampling,
            "sampling jitter exceeds tolerance at row " + std::to_string(i + 1));
  }
  return TimeSeries(std::move(samples), dt, std::move(meta));
}

/// Two-column "time,value" rows, no header.
inline void write_csv(std::ostream& out, const TimeSeries& ts) {
  for (std::size_t k = 0; k < ts.size(); ++k)
    out << format_double(static_cast<double>(k) * ts.dt()) << ',' << format_double(ts[k]) << '\n';
}

inline nlohmann::json to_json(const ChannelMeta& meta) {
  nlohmann::json j = nlohmann::json::object();
  if (meta.discharge_voltage) j["discharge_voltage"] = *meta.discharge_voltage;
  if (meta.magnetic_field) j["magnetic_field"] = *meta.magnetic_field;
  j["label"] = meta.label;
  return j;
}

inline nlohmann::json to_json(const TimeSeries& ts) {
  return {{"dt", ts.dt()}, {"meta", to_json(ts.meta())}, {"samples", ts.values()}};
}

inline TimeSeries time_series_from_json(const nlohmann::json& j) {
  try {
    ChannelMeta meta;
    if (j.contains("meta")) {
      const auto& m = j.at("meta");
      if (m.contains("discharge_voltage")) meta.discharge_voltage = m.at("discharge_voltage").get<double>();
      if (m.contains("magnetic_field")) meta.magnetic_field = m.at("magnetic_field").get<double>();
      if (m.contains("label")) meta.label = m.at("label").get<std::string>();
    }
    return TimeSeries(j.at("samples").get<std::vector<double>>(), j.at("dt").get<double>(), std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Malformed, std::string("time series JSON: ") + e.what());
  }
}

}  // namespace multiscale
