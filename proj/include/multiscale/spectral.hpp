#pragma once

// Periodogram estimation, log-log power-law fits with the Hurst relation
// alpha = 2H + 1, and the Heisenberg turbulence spectrum
//   E(f) = C f^(-5/3) (1 + (f/k_d)^4)^(-4/3),
// whose log-log slope runs from -5/3 (inertial range) to -7 (viscous range).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "multiscale/error.hpp"
#include "multiscale/fft.hpp"
#include "multiscale/io.hpp"
#include "multiscale/parallel.hpp"
#include "multiscale/regression.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

/// One-sided power spectral density, DC bin excluded.
struct PowerSpectrum {
  std::vector<double> freqs;  // Hz, strictly increasing, > 0
  std::vector<double> power;  // density per Hz
  std::size_t n_source = 0;
  double df = 0.0;

  std::size_t size() const noexcept { return freqs.size(); }

  void validate() const {
    require(freqs.size() == power.size(), Errc::LengthMismatch, "spectrum: freqs/power length mismatch");
    require(freqs.size() >= 2, Errc::TooShort, "spectrum needs at least 2 bins");
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      require(freqs[i] > 0.0 && (i == 0 || freqs[i] > freqs[i - 1]), Errc::InvalidArgument,
              "spectrum frequencies must be positive and strictly increasing");
      require(power[i] >= 0.0 && std::isfinite(power[i]), Errc::InvalidArgument, "spectrum power must be >= 0");
    }
  }
};

namespace detail {

// Order-fixed pairwise summation of equally sized rows.
inline std::vector<double> pairwise_row_sum(const std::vector<std::vector<double>>& rows, std::size_t lo,
                                            std::size_t hi) {
  if (hi - lo == 1) return rows[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  auto left = pairwise_row_sum(rows, lo, mid);
  const auto right = pairwise_row_sum(rows, mid, hi);
  for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
  return left;
}

}  // namespace detail

/// segments == 1: raw rectangular periodogram over the whole record.
/// segments > 1: Welch average of mean-removed, Hann-windowed segments.
/// Normalized so that df * sum(power) equals the series variance for the
/// raw periodogram (discrete Parseval).
inline PowerSpectrum periodogram(const TimeSeries& ts, std::size_t segments = 1, double overlap = 0.5) {
  require(segments >= 1, Errc::InvalidArgument, "segments must be >= 1");
  require(overlap >= 0.0 && overlap < 1.0, Errc::InvalidArgument, "overlap must lie in [0, 1)");
  const std::size_t n = ts.size();
  std::size_t seg_len = n;
  std::size_t step = n;
  if (segments > 1) {
    seg_len = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) / (1.0 + static_cast<double>(segments - 1) * (1.0 - overlap))));
    step = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(seg_len) * (1.0 - overlap))));
  }
  require(seg_len >= 8, Errc::TooShort, "segment length below 8 samples");

  const bool windowed = segments > 1;
  std::vector<double> window(seg_len, 1.0);
  if (windowed)
    for (std::size_t i = 0; i < seg_len; ++i)
      window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg_len)));
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  const std::size_t bins = seg_len / 2;
  const auto plan = fft::Plan::real_forward(seg_len);
  const auto x = ts.samples();
  std::vector<std::vector<double>> per_segment(segments);
  parallel_for(segments, [&](std::size_t s) {
    const auto seg = x.subspan(s * step, seg_len);
    std::vector<double> buf(seg.begin(), seg.end());
    if (windowed) {
      const double m = mean(buf);
      for (std::size_t i = 0; i < seg_len; ++i) buf[i] = (buf[i] - m) * window[i];
    }
    std::vector<fft::cplx> spec(seg_len / 2 + 1);
    plan.execute(buf.data(), spec.data());
    auto& row = per_segment[s];
    row.resize(bins);
    for (std::size_t k = 1; k <= bins; ++k) {
      const double one_sided = (2 * k == seg_len) ? 1.0 : 2.0;
      row[k - 1] = one_sided * std::norm(spec[k]) * ts.dt() / window_power;
    }
  });

  PowerSpectrum out;
  out.power = detail::pairwise_row_sum(per_segment, 0, segments);
  for (auto& p : out.power) p /= static_cast<double>(segments);
  out.n_source = n;
  out.df = 1.0 / (static_cast<double>(seg_len) * ts.dt());
  out.freqs.resize(bins);
  for (std::size_t k = 1; k <= bins; ++k) out.freqs[k - 1] = static_cast<double>(k) * out.df;
  return out;
}

struct PowerLawFit {
  double alpha = 0.0;      // P ~ f^(-alpha)
  double intercept = 0.0;  // log10 power at log10 f = 0
  double r2 = 0.0;
  double alpha_stderr = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
  std::size_t bins = 0;
};

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/// [4 df, Nyquist / 4], clear of the lowest bins and the aliasing edge.
inline Band default_fit_band(const PowerSpectrum& spec) {
  return {4.0 * spec.df, spec.freqs.back() / 4.0};
}

inline PowerLawFit fit_power_law(const PowerSpectrum& spec, double f_min, double f_max) {
  require(f_min < f_max, Errc::InvalidArgument, "fit band needs f_min < f_max");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.freqs[i] < f_min || spec.freqs[i] > f_max) continue;
    require(spec.power[i] > 0.0, Errc::ZeroPower, "zero power inside the fit band");
    lx.push_back(std::log10(spec.freqs[i]));
    ly.push_back(std::log10(spec.power[i]));
  }
  require(lx.size() >= 8, Errc::InsufficientBand, "fewer than 8 bins inside the fit band");
  const auto fit = ols(lx, ly);
  return {-fit.slope, fit.intercept, fit.r2, fit.slope_stderr, f_min, f_max, lx.size()};
}

struct HurstEstimate {
  double hurst = 0.0;
  bool out_of_range = false;  // outside [0, 1]
};

inline HurstEstimate hurst_from_alpha(double alpha) {
  const double h = (alpha - 1.0) / 2.0;
  return {h, !(h >= 0.0 && h <= 1.0)};
}

inline constexpr double kInertialSlope = -5.0 / 3.0;
inline constexpr double kDissipationExponent = 4.0;  // fixed, not a fit parameter

inline double heisenberg_model(double f, double amplitude, double k_d) {
  return amplitude * std::pow(f, kInertialSlope) * std::pow(1.0 + std::pow(f / k_d, kDissipationExponent), -4.0 / 3.0);
}

/// Analytic d log E / d log f of the Heisenberg model.
inline double heisenberg_log_slope(double f, double k_d) {
  const double r = std::pow(f / k_d, kDissipationExponent);
  return kInertialSlope - (16.0 / 3.0) * r / (1.0 + r);
}

struct HeisenbergFit {
  double amplitude = 0.0;
  double k_d = 0.0;
  double rss = 0.0;                 // log10 domain
  bool no_interior_minimum = false;  // k_d pinned at a band edge
  std::size_t iterations = 0;
  std::vector<double> rss_trace;  // best rss after each golden-section step
};

namespace detail {

struct HeisenbergObjective {
  std::vector<double> f;
  std::vector<double> log_power;

  double shape(double fi, double k_d) const {
    return kInertialSlope * std::log10(fi) - (4.0 / 3.0) * std::log10(1.0 + std::pow(fi / k_d, kDissipationExponent));
  }
  // Closed-form log10 C for fixed k_d.
  double log_amplitude(double k_d) const {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += log_power[i] - shape(f[i], k_d);
    return s / static_cast<double>(f.size());
  }
  double rss(double k_d) const {
    const double c = log_amplitude(k_d);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double r = log_power[i] - shape(f[i], k_d) - c;
      s += r * r;
    }
    return s;
  }
};

}  // namespace detail

/// Least squares in log10 space over (C, k_d). C is solved in closed form for
/// each k_d; k_d is bracketed on a log-spaced scan of the band and refined by
/// golden-section search in log k_d to relative tolerance `rel_tol`.
inline HeisenbergFit fit_heisenberg(const PowerSpectrum& spec, double f_min, double f_max, double rel_tol = 1e-6) {
  require(f_min > 0.0 && f_min < f_max, Errc::InvalidArgument, "Heisenberg band needs 0 < f_min < f_max");
  detail::HeisenbergObjective obj;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.freqs[i] < f_min || spec.freqs[i] > f_max) continue;
    require(spec.power[i] > 0.0, Errc::ZeroPower, "zero power inside the Heisenberg band");
    obj.f.push_back(spec.freqs[i]);
    obj.log_power.push_back(std::log10(spec.power[i]));
  }
  require(obj.f.size() >= 16, Errc::InsufficientBand, "fewer than 16 bins inside the Heisenberg band");

  const double lo = std::log(f_min), hi = std::log(f_max);
  const auto rss_at = [&](double u) { return obj.rss(std::exp(u)); };

  constexpr std::size_t kScan = 64;
  std::size_t best = 0;
  double best_rss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kScan; ++i) {
    const double r = rss_at(lo + (hi - lo) * static_cast<double>(i) / (kScan - 1));
    if (r < best_rss) {
      best_rss = r;
      best = i;
    }
  }
  const double cell = (hi - lo) / (kScan - 1);
  double a = std::max(lo, lo + cell * (static_cast<double>(best) - 1.0));
  double b = std::min(hi, lo + cell * (static_cast<double>(best) + 1.0));

  HeisenbergFit fit;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = rss_at(c), fd = rss_at(d);
  while (b - a > rel_tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = rss_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = rss_at(d);
    }
    ++fit.iterations;
    fit.rss_trace.push_back(std::min(fc, fd));
  }
  double u = 0.5 * (a + b);
  double fu = rss_at(u);
  if (fc < fu) u = c, fu = fc;
  if (fd < fu) u = d, fu = fd;

  fit.k_d = std::exp(u);
  fit.amplitude = std::pow(10.0, obj.log_amplitude(fit.k_d));
  fit.rss = fu;
  fit.no_interior_minimum = (u - lo) < 10.0 * rel_tol || (hi - u) < 10.0 * rel_tol;
  return fit;
}

/// Frequency of the largest periodogram bin.
inline double dominant_frequency(const PowerSpectrum& spec) {
  const auto it = std::max_element(spec.power.begin(), spec.power.end());
  return spec.freqs[static_cast<std::size_t>(it - spec.power.begin())];
}

/// Quarter of the dominant period, in samples (at least 1).
inline std::size_t default_embedding_lag(const TimeSeries& ts) {
  const double period = 1.0 / dominant_frequency(periodogram(ts));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(period / (4.0 * ts.dt()))));
}

inline void write_csv(std::ostream& out, const PowerSpectrum& spec) {
  out << "freq,power\n";
  for (std::size_t i = 0; i < spec.size(); ++i)
    out << format_double(spec.freqs[i]) << ',' << format_double(spec.power[i]) << '\n';
}

/// Reads the "freq,power" layout written above.
inline PowerSpectrum load_spectrum_csv(std::istream& in) {
  const auto rows = read_numeric_rows(in);
  PowerSpectrum spec;
  for (const auto& r : rows) {
    require(r.size() == 2, Errc::Malformed, "spectrum rows need freq,power");
    spec.freqs.push_back(r[0]);
    spec.power.push_back(r[1]);
  }
  require(spec.freqs.size() >= 2, Errc::TooShort, "spectrum CSV holds fewer than 2 rows");
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(Errc::Malformed, e.detail());
  }
  spec.df = spec.freqs[1] - spec.freqs[0];
  spec.n_source = 2 * spec.freqs.size();
  return spec;
}

inline nlohmann::json to_json(const PowerSpectrum& s) {
  return {{"freqs", s.freqs}, {"power", s.power}, {"n_source", s.n_source}, {"df", s.df}};
}

inline nlohmann::json to_json(const PowerLawFit& f) {
  const auto h = hurst_from_alpha(f.alpha);
  return {{"alpha", f.alpha},   {"alpha_stderr", f.alpha_stderr}, {"intercept", f.intercept},
          {"r2", f.r2},         {"f_min", f.f_min},               {"f_max", f.f_max},
          {"bins", f.bins},     {"hurst", h.hurst},               {"hurst_out_of_range", h.out_of_range}};
}

inline nlohmann::json to_json(const HeisenbergFit& f) {
  return {{"amplitude", f.amplitude},
          {"k_d", f.k_d},
          {"rss", f.rss},
          {"no_interior_minimum", f.no_interior_minimum},
          {"iterations", f.iterations}};
}

}  // namespace multiscale
