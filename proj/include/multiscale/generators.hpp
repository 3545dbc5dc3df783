#pragma once

// Synthetic signals with known analytic properties. All generators are
// deterministic functions of (seed, parameters).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <random>
#include <vector>

#include "multiscale/error.hpp"
#include "multiscale/fft.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

inline TimeSeries gen_white_noise(std::size_t n, Seed seed) {
  require(n >= 2, Errc::TooShort, "white noise needs n >= 2");
  std::mt19937_64 rng(seed.value);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = gauss(rng);
  return TimeSeries(std::move(x), 1.0);
}

/// Autocovariance of unit-variance fractional Gaussian noise at integer lag k.
inline double fgn_autocovariance(double hurst, double k) {
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(k + 1.0), e) - 2.0 * std::pow(std::abs(k), e) + std::pow(std::abs(k - 1.0), e));
}

/// Fractional Gaussian noise by circulant (Davies-Harte) embedding. The
/// cumulative sum of the output is fractional Brownian motion.
inline TimeSeries gen_fgn(std::size_t n, double hurst, Seed seed) {
  require(hurst > 0.0 && hurst < 1.0, Errc::InvalidArgument, "Hurst exponent must lie in (0, 1)");
  require(n >= 2, Errc::TooShort, "fGn needs n >= 2");

  const std::size_t m = fft::next_pow2(n);
  const std::size_t size = 2 * m;
  std::vector<fft::cplx> row(size);
  for (std::size_t j = 0; j <= m; ++j) row[j] = fgn_autocovariance(hurst, static_cast<double>(j));
  for (std::size_t j = m + 1; j < size; ++j) row[j] = row[size - j];
  const auto spectrum = fft::dft(row, FFTW_FORWARD);

  std::vector<double> eig(size);
  double largest = 0.0, total = 0.0, negative = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    eig[k] = spectrum[k].real();
    largest = std::max(largest, eig[k]);
    total += std::abs(eig[k]);
    if (eig[k] < 0.0) negative += -eig[k];
  }
  require(negative <= 1e-3 * total, Errc::EmbeddingFailure, "circulant embedding is not nonnegative definite");
  if (negative > 1e-10 * largest)
    std::clog << "multiscale: gen_fgn clamped negative circulant eigenvalues (mass " << negative << ")\n";

  std::mt19937_64 rng(seed.value);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<fft::cplx> weighted(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    weighted[k] = std::sqrt(std::max(eig[k], 0.0) / static_cast<double>(size)) * fft::cplx(re, im);
  }
  const auto y = fft::dft(weighted, FFTW_FORWARD);
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = y[j].real();
  return TimeSeries(std::move(x), 1.0);
}

/// Binomial multiplicative cascade of 2^levels cells, normalized to unit
/// mean. Cell i carries p for every 0 bit and 1-p for every 1 bit of its
/// binary address (most significant bit = first split).
inline TimeSeries gen_binomial_cascade(unsigned levels, double p, Seed seed, bool shuffle = false) {
  require(levels >= 1 && levels <= 24, Errc::InvalidArgument, "cascade levels must lie in [1, 24]");
  require(p > 0.0 && p < 1.0, Errc::InvalidArgument, "cascade weight must lie in (0, 1)");
  std::vector<double> cells{1.0};
  for (unsigned l = 0; l < levels; ++l) {
    std::vector<double> next(cells.size() * 2);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      next[2 * i] = cells[i] * p * 2.0;
      next[2 * i + 1] = cells[i] * (1.0 - p) * 2.0;
    }
    cells = std::move(next);
  }
  if (shuffle) {
    std::mt19937_64 rng(seed.value);
    std::shuffle(cells.begin(), cells.end(), rng);
  }
  return TimeSeries(std::move(cells), 1.0);
}

struct SineComponent {
  double frequency = 1.0;  // Hz
  double amplitude = 1.0;
  double phase = 0.0;      // radians
};

inline TimeSeries gen_sum_of_sines(std::size_t n, double dt, std::span<const SineComponent> parts) {
  require(n >= 2, Errc::TooShort, "sine needs n >= 2");
  require(std::isfinite(dt) && dt > 0.0, Errc::InvalidArgument, "dt must be > 0");
  for (const auto& c : parts) {
    require(c.frequency > 0.0, Errc::InvalidArgument, "sine frequency must be > 0");
    require(c.frequency < 0.5 / dt, Errc::Aliased, "sine frequency at or above Nyquist");
  }
  std::vector<double> x(n, 0.0);
  for (const auto& c : parts)
    for (std::size_t k = 0; k < n; ++k)
      x[k] += c.amplitude * std::sin(2.0 * std::numbers::pi * c.frequency * static_cast<double>(k) * dt + c.phase);
  return TimeSeries(std::move(x), dt);
}

inline TimeSeries gen_sine(std::size_t n, double dt, double frequency, double amplitude = 1.0, double phase = 0.0) {
  const SineComponent c{frequency, amplitude, phase};
  return gen_sum_of_sines(n, dt, std::span(&c, 1));
}

}  // namespace multiscale
