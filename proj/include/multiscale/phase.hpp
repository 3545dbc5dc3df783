#pragma once

// Instantaneous wavelet phase at a single scale, band reconstruction, and
// phase-locking detection between two channels.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "multiscale/cwt.hpp"
#include "multiscale/error.hpp"
#include "multiscale/io.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

/// Maps any real angle into (-pi, pi].
inline double wrap_phase(double x) {
  double r = std::remainder(x, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// Quadrant-aware arctangent of a coefficient, in (-pi, pi].
inline double phase_angle(cplx w) { return wrap_phase(std::arg(w)); }

struct PhaseSeries {
  std::vector<double> wrapped;        // (-pi, pi]
  std::vector<double> unwrapped;      // wrapped + 2 pi * turns
  std::vector<std::int64_t> turns;
  std::vector<std::uint8_t> coi_valid;
  double scale = 0.0;  // seconds
  double dt = 1.0;

  std::size_t size() const noexcept { return wrapped.size(); }
};

/// Adds whole turns so successive differences of the result lie in (-pi, pi].
inline PhaseSeries unwrap_phases(std::vector<double> wrapped) {
  PhaseSeries ps;
  ps.turns.assign(wrapped.size(), 0);
  ps.unwrapped.resize(wrapped.size());
  for (std::size_t k = 0; k < wrapped.size(); ++k) {
    if (k > 0) {
      const double step = wrapped[k] - wrapped[k - 1];
      ps.turns[k] = ps.turns[k - 1] + (step > std::numbers::pi ? -1 : (step <= -std::numbers::pi ? 1 : 0));
    }
    ps.unwrapped[k] = wrapped[k] + 2.0 * std::numbers::pi * static_cast<double>(ps.turns[k]);
  }
  ps.wrapped = std::move(wrapped);
  ps.coi_valid.assign(ps.wrapped.size(), 1);
  return ps;
}

inline PhaseSeries phase_at_scale(const TimeSeries& ts, double scale, MorletParams params = {},
                                  CwtPadding padding = CwtPadding::Zero) {
  require(ts.size() >= 32, Errc::TooShort, "phase analysis needs at least 32 samples");
  require(scale >= 2.0 * ts.dt() * (1.0 - 1e-12) && scale <= ts.duration() / 4.0 * (1.0 + 1e-12),
          Errc::ScaleOutOfRange, "scale must lie within [2 dt, N dt / 4]");
  const detail::MorletEngine engine(ts, params, padding, scale);
  const auto row = engine.row(scale);
  std::vector<double> wrapped(row.size());
  for (std::size_t t = 0; t < row.size(); ++t) wrapped[t] = phase_angle(row[t]);
  auto ps = unwrap_phases(std::move(wrapped));
  const auto coi = cone_of_influence(ts.size(), ts.dt());
  for (std::size_t t = 0; t < ts.size(); ++t) ps.coi_valid[t] = scale <= coi[t] ? 1 : 0;
  ps.scale = scale;
  ps.dt = ts.dt();
  return ps;
}

/// Band-limited inverse sum (dj sqrt(dt) / (C_delta psi0(0))) sum_j Re W_j / sqrt(s_j).
inline TimeSeries reconstruct_band(const Scalogram& sg, double s_lo, double s_hi) {
  const auto idx = scales_in_band(sg.grid, s_lo, s_hi);
  const double psi0_at_zero = std::pow(std::numbers::pi, -0.25);
  const double factor = sg.grid.dj * std::sqrt(sg.dt) / (sg.params().reconstruction_factor() * psi0_at_zero);
  std::vector<double> out(sg.n, 0.0);
  for (std::size_t j : idx) {
    const double inv_root = 1.0 / std::sqrt(sg.grid.scale(j));
    for (std::size_t t = 0; t < sg.n; ++t) out[t] += sg.at(j, t).real() * inv_root;
  }
  for (auto& v : out) v *= factor;
  return TimeSeries(std::move(out), sg.dt);
}

struct LockingInterval {
  std::size_t start = 0;  // first sample
  std::size_t end = 0;    // one past the last sample

  std::size_t length() const noexcept { return end - start; }
  friend bool operator==(const LockingInterval&, const LockingInterval&) = default;
};

struct PhaseDiffResult {
  std::vector<double> delta;  // wrapped a - b
  std::vector<std::uint8_t> coi_valid;
  std::vector<LockingInterval> locking_intervals;
  double tolerance = 0.5;
  std::size_t min_duration = 0;
  double scale = 0.0;
  double dt = 1.0;
};

inline PhaseDiffResult phase_difference(const PhaseSeries& a, const PhaseSeries& b) {
  require(a.size() == b.size(), Errc::LengthMismatch, "phase series differ in length");
  require(std::abs(a.scale - b.scale) <= 1e-12 * std::max(std::abs(a.scale), std::abs(b.scale)), Errc::ScaleMismatch,
          "phase series were taken at different scales");
  PhaseDiffResult r;
  r.delta.resize(a.size());
  r.coi_valid.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    r.delta[k] = wrap_phase(a.wrapped[k] - b.wrapped[k]);
    r.coi_valid[k] = (a.coi_valid[k] != 0 && b.coi_valid[k] != 0) ? 1 : 0;
  }
  r.scale = a.scale;
  r.dt = a.dt;
  return r;
}

/// Maximal runs where the range of the (unwrapped) phase difference over a
/// centered window [k - h, k + h], h = ceil(min_duration / 2), stays within
/// `tolerance` and the cone of influence holds; shorter runs are dropped.
inline std::vector<LockingInterval> locking_intervals(const PhaseDiffResult& diff, double tolerance,
                                                      std::size_t min_duration) {
  require(tolerance > 0.0 && tolerance < std::numbers::pi, Errc::InvalidArgument, "tolerance must lie in (0, pi)");
  require(min_duration >= 2, Errc::InvalidArgument, "min_duration must be >= 2");
  const std::size_t n = diff.delta.size();
  const auto cont = unwrap_phases(diff.delta).unwrapped;
  const std::size_t h = (min_duration + 1) / 2;

  // Sliding max/min over [k - h, k + h] clipped to the record.
  std::deque<std::size_t> maxq, minq;
  std::size_t right = 0;
  std::vector<std::uint8_t> locked(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t hi = std::min(n - 1, k + h);
    const std::size_t lo = k >= h ? k - h : 0;
    for (; right <= hi; ++right) {
      while (!maxq.empty() && cont[maxq.back()] <= cont[right]) maxq.pop_back();
      maxq.push_back(right);
      while (!minq.empty() && cont[minq.back()] >= cont[right]) minq.pop_back();
      minq.push_back(right);
    }
    while (maxq.front() < lo) maxq.pop_front();
    while (minq.front() < lo) minq.pop_front();
    const bool coi = diff.coi_valid.empty() || diff.coi_valid[k] != 0;
    locked[k] = (coi && cont[maxq.front()] - cont[minq.front()] <= tolerance) ? 1 : 0;
  }

  std::vector<LockingInterval> out;
  std::size_t k = 0;
  while (k < n) {
    if (locked[k] == 0) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < n && locked[e] != 0) ++e;
    if (e - k >= min_duration) out.push_back({k, e});
    k = e;
  }
  return out;
}

inline PhaseDiffResult detect_locking(PhaseDiffResult diff, double tolerance, std::size_t min_duration) {
  diff.locking_intervals = locking_intervals(diff, tolerance, min_duration);
  diff.tolerance = tolerance;
  diff.min_duration = min_duration;
  return diff;
}

/// Rows: t,wrapped,unwrapped,coi_valid.
inline void write_csv(std::ostream& out, const PhaseSeries& ps) {
  out << "t,wrapped,unwrapped,coi_valid\n";
  for (std::size_t k = 0; k < ps.size(); ++k)
    out << format_double(static_cast<double>(k) * ps.dt) << ',' << format_double(ps.wrapped[k]) << ','
        << format_double(ps.unwrapped[k]) << ',' << static_cast<int>(ps.coi_valid[k]) << '\n';
}

inline void write_csv(std::ostream& out, const PhaseDiffResult& d) {
  const auto u = unwrap_phases(d.delta);
  write_csv(out, PhaseSeries{u.wrapped, u.unwrapped, u.turns, d.coi_valid, d.scale, d.dt});
}

inline nlohmann::json to_json(const LockingInterval& i) { return {{"start", i.start}, {"end", i.end}}; }

inline nlohmann::json to_json(const std::vector<LockingInterval>& v) {
  auto arr = nlohmann::json::array();
  for (const auto& i : v) arr.push_back(to_json(i));
  return arr;
}

inline nlohmann::json to_json(const PhaseSeries& ps) {
  return {{"scale", ps.scale},     {"dt", ps.dt},         {"wrapped", ps.wrapped},
          {"unwrapped", ps.unwrapped}, {"coi_valid", ps.coi_valid}};
}

inline nlohmann::json to_json(const PhaseDiffResult& d) {
  return {{"scale", d.scale},
          {"dt", d.dt},
          {"delta", d.delta},
          {"coi_valid", d.coi_valid},
          {"tolerance", d.tolerance},
          {"min_duration", d.min_duration},
          {"locking_intervals", to_json(d.locking_intervals)}};
}

}  // namespace multiscale
