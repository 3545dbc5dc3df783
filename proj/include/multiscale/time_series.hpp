#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multiscale/error.hpp"

namespace multiscale {

/// Acquisition context of a channel. Voltage in volts, field in gauss.
struct ChannelMeta {
  std::optional<double> discharge_voltage;
  std::optional<double> magnetic_field;
  std::string label;

  void validate() const {
    if (discharge_voltage)
      require(std::isfinite(*discharge_voltage) && *discharge_voltage > 0.0, Errc::InvalidArgument,
              "discharge_voltage must be > 0");
    if (magnetic_field)
      require(std::isfinite(*magnetic_field) && *magnetic_field >= 0.0, Errc::InvalidArgument,
              "magnetic_field must be >= 0");
  }

  friend bool operator==(const ChannelMeta&, const ChannelMeta&) = default;
};

struct Seed {
  std::uint64_t value = 0;
};

/// Uniformly sampled real series. Immutable once constructed.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double dt, ChannelMeta meta = {})
      : samples_(std::move(samples)), dt_(dt), meta_(std::move(meta)) {
    require(samples_.size() >= 2, Errc::TooShort, "time series needs at least 2 samples");
    require(std::isfinite(dt_) && dt_ > 0.0, Errc::InvalidArgument, "dt must be finite and > 0");
    for (double v : samples_) require(std::isfinite(v), Errc::InvalidArgument, "non-finite sample");
    meta_.validate();
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  double dt() const noexcept { return dt_; }
  double duration() const noexcept { return static_cast<double>(samples_.size()) * dt_; }
  double nyquist() const noexcept { return 0.5 / dt_; }
  const ChannelMeta& meta() const noexcept { return meta_; }

  TimeSeries with_samples(std::vector<double> samples) const { return TimeSeries(std::move(samples), dt_, meta_); }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> samples_;
  double dt_;
  ChannelMeta meta_;
};

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Population variance.
inline double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

/// Lag-1 sample autocorrelation; 0 for a constant series.
inline double lag1_autocorrelation(std::span<const double> x) {
  const double m = mean(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - m;
    den += d * d;
    if (i + 1 < x.size()) num += d * (x[i + 1] - m);
  }
  return den > 0.0 ? num / den : 0.0;
}

/// Cumulative sum of mean-removed samples, y_k = sum_{i<=k} (x_i - <x>).
inline TimeSeries profile(const TimeSeries& ts) {
  const double m = mean(ts.samples());
  std::vector<double> y(ts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    acc += ts[i] - m;
    y[i] = acc;
  }
  return ts.with_samples(std::move(y));
}

/// Delay-coordinate points (x_k, x_{k+lag}, ..., x_{k+(Dim-1)lag}).
template <std::size_t Dim>
std::vector<std::array<double, Dim>> delay_embed(const TimeSeries& ts, std::size_t lag) {
  static_assert(Dim == 2 || Dim == 3, "embedding dimension must be 2 or 3");
  require(lag >= 1, Errc::InvalidArgument, "embedding lag must be >= 1");
  require(ts.size() > lag * (Dim - 1), Errc::TooShort, "series shorter than the embedding window");
  const std::size_t count = ts.size() - lag * (Dim - 1);
  std::vector<std::array<double, Dim>> points(count);
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t d = 0; d < Dim; ++d) points[k][d] = ts[k + d * lag];
  return points;
}

}  // namespace multiscale
