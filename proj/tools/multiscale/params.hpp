#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "multiscale/error.hpp"
#include "multiscale/fractal.hpp"
#include "multiscale/io.hpp"

namespace cli {

using multiscale::Errc;
using multiscale::Error;
using multiscale::require;

/// Flat dotted-key parameter store. Config files and flags both land here, so
/// a run is the same whichever way a key was supplied.
class Params {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback = "") const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double num(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(key, str(key));
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const double v = num(key, 0.0);
    require(v >= 0.0 && v == std::floor(v) && v < 1e15, Errc::InvalidArgument, key + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key) const {
    const auto v = str(key, "false");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(Errc::InvalidArgument, key + " expects a boolean, got '" + v + "'");
  }

  /// Scales accept a trailing "dt" multiplier, e.g. "2dt" or "dt".
  double scale(const std::string& key, double fallback, double dt) const {
    if (!has(key)) return fallback;
    std::string v = str(key);
    if (v.size() >= 2 && v.compare(v.size() - 2, 2, "dt") == 0) {
      v.resize(v.size() - 2);
      return (v.empty() ? 1.0 : parse_double(key, v)) * dt;
    }
    return parse_double(key, v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& cell : split(str(key))) out.push_back(parse_double(key, cell));
    return out;
  }

  /// "lo..hi" is a dyadic ladder; otherwise a comma-separated list.
  std::optional<std::vector<std::size_t>> sizes(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const std::string v = str(key);
    const auto dots = v.find("..");
    auto as_size = [&](const std::string& s) {
      const double d = parse_double(key, s);
      require(d >= 1.0 && d == std::floor(d), Errc::InvalidArgument, key + " entries must be positive integers");
      return static_cast<std::size_t>(d);
    };
    if (dots != std::string::npos) {
      const auto lo = as_size(v.substr(0, dots)), hi = as_size(v.substr(dots + 2));
      require(lo <= hi, Errc::InvalidArgument, key + " range must be ascending");
      return multiscale::dyadic_sizes(lo, hi);
    }
    std::vector<std::size_t> out;
    for (const auto& cell : split(v)) out.push_back(as_size(cell));
    return out;
  }

  /// "lo..hi" steps by one and skips zero; otherwise a comma-separated list.
  std::optional<std::vector<double>> q_values(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const std::string v = str(key);
    const auto dots = v.find("..");
    if (dots == std::string::npos) return list(key);
    const double lo = parse_double(key, v.substr(0, dots)), hi = parse_double(key, v.substr(dots + 2));
    require(lo <= hi && hi - lo <= 100, Errc::InvalidArgument, key + " range must be ascending and short");
    std::vector<double> out;
    for (double q = lo; q <= hi + 1e-9; q += 1.0)
      if (std::abs(q) > 1e-9) out.push_back(q);
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  static std::vector<std::string> split(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
      if (c == ',') {
        out.emplace_back(multiscale::detail::trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!multiscale::detail::trim(cur).empty() || !out.empty()) out.emplace_back(multiscale::detail::trim(cur));
    return out;
  }

 private:
  static double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    require(multiscale::detail::parse_number(multiscale::detail::trim(text), v) && std::isfinite(v), Errc::InvalidArgument,
            key + ": '" + text + "' is not a number");
    return v;
  }

  std::map<std::string, std::string> values_;
};

/// key = value lines; '#' starts a comment. Keys must be in `known`.
inline Params read_config(const std::string& path, const std::set<std::string>& known) {
  std::ifstream in(path);
  require(in.good(), Errc::Io, "cannot open config '" + path + "'");
  Params p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = multiscale::detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string_view::npos, Errc::InvalidArgument,
            path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key(multiscale::detail::trim(body.substr(0, eq)));
    require(known.count(key) != 0, Errc::InvalidArgument, path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    p.set(key, std::string(multiscale::detail::trim(body.substr(eq + 1))));
  }
  return p;
}

}  // namespace cli
