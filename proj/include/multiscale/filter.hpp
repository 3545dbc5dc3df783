#pragma once

#include <cmath>
#include <vector>

#include "multiscale/error.hpp"
#include "multiscale/fft.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

/// Zero-phase brick-wall low-pass: every DFT bin above `cutoff` Hz is zeroed.
/// The DC bin is never touched, so the mean is preserved.
inline TimeSeries lowpass(const TimeSeries& ts, double cutoff) {
  require(cutoff > 0.0 && cutoff < ts.nyquist(), Errc::InvalidArgument, "cutoff must lie in (0, Nyquist)");
  const std::size_t n = ts.size();
  auto spectrum = fft::rfft(ts.samples());
  const double df = 1.0 / (static_cast<double>(n) * ts.dt());
  for (std::size_t k = 1; k < spectrum.size(); ++k)
    if (static_cast<double>(k) * df > cutoff) spectrum[k] = 0.0;
  auto y = fft::irfft(spectrum, n);
  for (auto& v : y) v /= static_cast<double>(n);
  return ts.with_samples(std::move(y));
}

}  // namespace multiscale
