#pragma once

// Continuous Morlet wavelet transform computed in the frequency domain.
//
// Discrete normalization: W_n(s) = sum_m x_m sqrt(dt/s) psi0*((m - n) dt / s),
// psi0(eta) = pi^(-1/4) exp(i omega0 eta) exp(-eta^2 / 2). In Fourier space
// each row is IDFT[ xhat_k * psihat(s omega_k) * sqrt(2 pi s / dt) ] with the
// analytic spectrum psihat(s omega) = pi^(-1/4) exp(-(s omega - omega0)^2 / 2)
// for omega > 0 and 0 otherwise.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "multiscale/error.hpp"
#include "multiscale/fft.hpp"
#include "multiscale/io.hpp"
#include "multiscale/parallel.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

using cplx = std::complex<double>;

struct MorletParams {
  double omega0 = 6.0;

  /// Complex Morlet written as exp(2 pi i Fc t - t^2 / Fb) / sqrt(pi Fb).
  static MorletParams from_bandwidth_center(double bandwidth, double center) {
    require(bandwidth > 0.0 && center > 0.0, Errc::InvalidArgument, "Morlet Fb and Fc must be > 0");
    return MorletParams{2.0 * std::numbers::pi * center * std::sqrt(bandwidth / 2.0) * std::numbers::sqrt2}.validated();
  }

  MorletParams validated() const {
    require(std::isfinite(omega0) && omega0 >= 5.0, Errc::InvalidArgument, "Morlet omega0 must be >= 5");
    return *this;
  }

  /// Equivalent Fourier period divided by scale.
  double fourier_factor() const { return 4.0 * std::numbers::pi / (omega0 + std::sqrt(2.0 + omega0 * omega0)); }

  double spectrum(double scaled_omega) const {
    if (scaled_omega <= 0.0) return 0.0;
    const double d = scaled_omega - omega0;
    return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * d * d);
  }

  cplx time_domain(double eta) const {
    return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * eta * eta) * std::polar(1.0, omega0 * eta);
  }

  /// Reconstruction constant C_delta; tabulated for omega0 = 6 only.
  double reconstruction_factor() const { return 0.776; }
  bool calibrated() const { return omega0 == 6.0; }
};

/// Scales s_j = s0 * 2^(j dj), j = 0..count-1, in seconds.
struct ScaleGrid {
  double s0 = 2.0;
  double dj = 0.125;
  std::size_t count = 1;

  double scale(std::size_t j) const { return s0 * std::exp2(static_cast<double>(j) * dj); }
  double max_scale() const { return scale(count - 1); }
  std::vector<double> scales() const {
    std::vector<double> s(count);
    for (std::size_t j = 0; j < count; ++j) s[j] = scale(j);
    return s;
  }

  void validate() const {
    require(s0 > 0.0 && std::isfinite(s0), Errc::InvalidArgument, "grid s0 must be > 0");
    require(dj > 0.0 && std::isfinite(dj), Errc::InvalidArgument, "grid dj must be > 0");
    require(count >= 1, Errc::InvalidArgument, "grid needs at least one scale");
  }

  /// Largest grid whose top scale does not exceed max_scale.
  static ScaleGrid spanning(double s0, double dj, double max_scale) {
    require(s0 > 0.0 && dj > 0.0 && max_scale >= s0, Errc::GridTooCoarse, "grid s0 exceeds the largest allowed scale");
    const auto count = static_cast<std::size_t>(std::floor(std::log2(max_scale / s0) / dj + 1e-9)) + 1;
    return ScaleGrid{s0, dj, count};
  }

  /// s0 = 2 dt, dj = 1/8, top scale N dt / 4.
  static ScaleGrid default_for(std::size_t n, double dt) {
    return spanning(2.0 * dt, 0.125, static_cast<double>(n) * dt / 4.0);
  }
};

enum class CwtPadding {
  Zero,      // linear convolution: zero padding well beyond the widest wavelet
  Periodic,  // circular convolution over the record itself
};

struct Scalogram {
  std::vector<cplx> coeffs;  // row-major (scale, time)
  ScaleGrid grid;
  std::size_t n = 0;
  double dt = 1.0;
  double omega0 = 6.0;
  std::vector<double> coi;  // per-time largest trustworthy scale, seconds
  double signal_variance = 0.0;
  double signal_lag1 = 0.0;

  std::size_t scales() const noexcept { return grid.count; }
  cplx at(std::size_t j, std::size_t t) const { return coeffs[j * n + t]; }
  std::span<const cplx> row(std::size_t j) const { return std::span(coeffs).subspan(j * n, n); }
  double power(std::size_t j, std::size_t t) const { return std::norm(at(j, t)); }
  bool inside_coi(std::size_t j, std::size_t t) const { return grid.scale(j) <= coi[t]; }
  MorletParams params() const { return MorletParams{omega0}; }
};

/// e-folding time of the Morlet envelope is sqrt(2) s, so the trusted scale at
/// distance d from the nearest edge is d / sqrt(2).
inline std::vector<double> cone_of_influence(std::size_t n, double dt) {
  std::vector<double> coi(n);
  for (std::size_t t = 0; t < n; ++t)
    coi[t] = static_cast<double>(std::min(t, n - 1 - t)) * dt / std::numbers::sqrt2;
  return coi;
}

namespace detail {

// Signal spectrum prepared once; rows are produced per scale.
class MorletEngine {
 public:
  MorletEngine(const TimeSeries& ts, MorletParams params, CwtPadding padding, double max_scale)
      : n_(ts.size()), dt_(ts.dt()), params_(params.validated()) {
    if (padding == CwtPadding::Zero) {
      const auto reach = static_cast<std::size_t>(std::ceil(8.0 * max_scale / dt_));
      m_ = fft::next_pow2(n_ + reach);
    } else {
      m_ = n_;
    }
    std::vector<double> padded(m_, 0.0);
    std::copy(ts.samples().begin(), ts.samples().end(), padded.begin());
    spectrum_ = fft::rfft(padded);
    for (auto& v : spectrum_) v /= static_cast<double>(m_);
    inverse_ = std::make_unique<fft::Plan>(fft::Plan::complex(m_, FFTW_BACKWARD));
  }

  std::vector<cplx> row(double scale) const {
    std::vector<cplx> work(m_, cplx(0.0, 0.0));
    const double norm = std::sqrt(2.0 * std::numbers::pi * scale / dt_);
    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(m_) * dt_);
    for (std::size_t k = 1; k <= m_ / 2; ++k)
      work[k] = spectrum_[k] * (params_.spectrum(scale * domega * static_cast<double>(k)) * norm);
    std::vector<cplx> out(m_);
    inverse_->execute(work.data(), out.data());
    out.resize(n_);
    return out;
  }

  std::size_t padded_length() const noexcept { return m_; }

 private:
  std::size_t n_;
  double dt_;
  MorletParams params_;
  std::size_t m_ = 0;
  std::vector<cplx> spectrum_;
  std::unique_ptr<fft::Plan> inverse_;
};

}  // namespace detail

inline Scalogram cwt_morlet(const TimeSeries& ts, const ScaleGrid& grid, MorletParams params = {},
                            CwtPadding padding = CwtPadding::Zero) {
  grid.validate();
  require(ts.size() >= 32, Errc::TooShort, "CWT needs at least 32 samples");
  require(grid.max_scale() <= ts.duration() / 4.0 * (1.0 + 1e-12), Errc::GridTooCoarse,
          "largest grid scale exceeds N dt / 4");
  const detail::MorletEngine engine(ts, params, padding, grid.max_scale());

  Scalogram sg;
  sg.grid = grid;
  sg.n = ts.size();
  sg.dt = ts.dt();
  sg.omega0 = params.omega0;
  sg.coi = cone_of_influence(ts.size(), ts.dt());
  sg.signal_variance = variance(ts.samples());
  sg.signal_lag1 = lag1_autocorrelation(ts.samples());
  sg.coeffs.resize(grid.count * ts.size());
  parallel_for(grid.count, [&](std::size_t j) {
    const auto r = engine.row(grid.scale(j));
    std::copy(r.begin(), r.end(), sg.coeffs.begin() + static_cast<std::ptrdiff_t>(j * sg.n));
  });
  return sg;
}

/// Time-mean of |W|^2 per scale; coi_only restricts the mean to the cone.
inline std::vector<double> global_spectrum(const Scalogram& sg, bool coi_only = false) {
  std::vector<double> g(sg.scales(), 0.0);
  for (std::size_t j = 0; j < sg.scales(); ++j) {
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < sg.n; ++t) {
      if (coi_only && !sg.inside_coi(j, t)) continue;
      s += sg.power(j, t);
      ++count;
    }
    require(count > 0, Errc::EmptyCOI, "no cone-of-influence samples at scale " + format_double(sg.grid.scale(j)));
    g[j] = s / static_cast<double>(count);
  }
  return g;
}

inline std::vector<double> scale_power_sum(const Scalogram& sg) {
  std::vector<double> g(sg.scales(), 0.0);
  for (std::size_t j = 0; j < sg.scales(); ++j)
    for (std::size_t t = 0; t < sg.n; ++t) g[j] += sg.power(j, t);
  return g;
}

/// Indices of grid scales inside [s_lo, s_hi].
inline std::vector<std::size_t> scales_in_band(const ScaleGrid& grid, double s_lo, double s_hi) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < grid.count; ++j)
    if (grid.scale(j) >= s_lo && grid.scale(j) <= s_hi) idx.push_back(j);
  require(!idx.empty(), Errc::EmptyBand, "scale band does not intersect the grid");
  return idx;
}

/// Scale-averaged wavelet power (dj dt / C_delta) sum_j |W|^2 / s_j.
inline TimeSeries scale_avg_variance(const Scalogram& sg, double s_lo, double s_hi) {
  const auto idx = scales_in_band(sg.grid, s_lo, s_hi);
  const double factor = sg.grid.dj * sg.dt / sg.params().reconstruction_factor();
  std::vector<double> out(sg.n, 0.0);
  for (std::size_t j : idx) {
    const double s = sg.grid.scale(j);
    for (std::size_t t = 0; t < sg.n; ++t) out[t] += sg.power(j, t) / s;
  }
  for (auto& v : out) v *= factor;
  return TimeSeries(std::move(out), sg.dt);
}

struct SignificanceMask {
  std::vector<std::uint8_t> significant;  // row-major (scale, time)
  std::size_t scales = 0;
  std::size_t n = 0;
  double background_lag1 = 0.0;
  double level = 0.95;

  bool at(std::size_t j, std::size_t t) const { return significant[j * n + t] != 0; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(significant.begin(), significant.end(), std::uint8_t{1}));
  }
};

/// Normalized red-noise spectrum at the Fourier frequency of each scale.
inline std::vector<double> red_noise_background(const Scalogram& sg, double lag1) {
  std::vector<double> p(sg.scales());
  const double ff = sg.params().fourier_factor();
  for (std::size_t j = 0; j < sg.scales(); ++j) {
    const double freq_dt = sg.dt / (ff * sg.grid.scale(j));  // k / N
    p[j] = (1.0 - lag1 * lag1) / (1.0 + lag1 * lag1 - 2.0 * lag1 * std::cos(2.0 * std::numbers::pi * freq_dt));
  }
  return p;
}

/// |W|^2 / sigma^2 against P_k chi2_2(level) / 2 with a lag-1 red-noise
/// background estimated from the analyzed series.
inline SignificanceMask significance_mask(const Scalogram& sg, double level = 0.95) {
  require(level > 0.5 && level < 1.0, Errc::InvalidArgument, "confidence level must lie in (0.5, 1)");
  SignificanceMask mask;
  mask.scales = sg.scales();
  mask.n = sg.n;
  mask.level = level;
  mask.background_lag1 = sg.signal_lag1;
  mask.significant.assign(sg.scales() * sg.n, 0);
  if (!(sg.signal_variance > 0.0)) return mask;
  // Two-degree-of-freedom chi-square quantile has the closed form -2 ln(1 - level).
  const double chi2_half = -std::log(1.0 - level);
  const auto background = red_noise_background(sg, sg.signal_lag1);
  for (std::size_t j = 0; j < sg.scales(); ++j) {
    const double threshold = background[j] * chi2_half * sg.signal_variance;
    for (std::size_t t = 0; t < sg.n; ++t) mask.significant[j * sg.n + t] = sg.power(j, t) > threshold ? 1 : 0;
  }
  return mask;
}

/// Strict interior maxima above `rel_floor` times the largest value, strongest first.
inline std::vector<std::size_t> spectrum_peaks(std::span<const double> g, std::size_t max_peaks = SIZE_MAX,
                                               double rel_floor = 1e-2) {
  std::vector<std::size_t> peaks;
  if (g.empty()) return peaks;
  const double floor = rel_floor * *std::max_element(g.begin(), g.end());
  for (std::size_t j = 1; j + 1 < g.size(); ++j)
    if (g[j] > g[j - 1] && g[j] >= g[j + 1] && g[j] > floor) peaks.push_back(j);
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
  if (peaks.size() > max_peaks) peaks.resize(max_peaks);
  return peaks;
}

/// Top-k global-spectrum peak scales in seconds.
inline std::vector<double> peak_scales(const Scalogram& sg, std::size_t k) {
  const auto g = global_spectrum(sg, false);
  std::vector<double> out;
  for (std::size_t j : spectrum_peaks(g, k)) out.push_back(sg.grid.scale(j));
  return out;
}

// Binary layout: "MSCL1", u64 N, u64 J, f64 dt, f64 omega0, J f64 scales,
// then J*N (re, im) f64 pairs, row-major, all little-endian.
inline constexpr char kScalogramMagic[5] = {'M', 'S', 'C', 'L', '1'};

namespace detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

template <typename T>
T read_le(std::istream& in) {
  static_assert(sizeof(T) == 8);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  require(in.gcount() == 8, Errc::Malformed, "truncated scalogram stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace detail

inline void write_scalogram_binary(std::ostream& out, const Scalogram& sg) {
  out.write(kScalogramMagic, sizeof kScalogramMagic);
  detail::write_le<std::uint64_t>(out, sg.n);
  detail::write_le<std::uint64_t>(out, sg.scales());
  detail::write_le<double>(out, sg.dt);
  detail::write_le<double>(out, sg.omega0);
  for (std::size_t j = 0; j < sg.scales(); ++j) detail::write_le<double>(out, sg.grid.scale(j));
  for (const auto& c : sg.coeffs) {
    detail::write_le<double>(out, c.real());
    detail::write_le<double>(out, c.imag());
  }
}

/// Inverse of write_scalogram_binary. The grid is rebuilt from the first two
/// scales; series statistics are not stored and come back as NaN.
inline Scalogram read_scalogram_binary(std::istream& in) {
  char magic[5];
  in.read(magic, 5);
  require(in.gcount() == 5 && std::memcmp(magic, kScalogramMagic, 5) == 0, Errc::Malformed, "bad scalogram magic");
  Scalogram sg;
  sg.n = detail::read_le<std::uint64_t>(in);
  const auto count = detail::read_le<std::uint64_t>(in);
  sg.dt = detail::read_le<double>(in);
  sg.omega0 = detail::read_le<double>(in);
  require(count >= 1 && sg.n >= 1, Errc::Malformed, "empty scalogram");
  std::vector<double> scales(count);
  for (auto& s : scales) s = detail::read_le<double>(in);
  sg.grid = ScaleGrid{scales[0], count > 1 ? std::log2(scales[1] / scales[0]) : 1.0, count};
  sg.coeffs.resize(count * sg.n);
  for (auto& c : sg.coeffs) {
    const double re = detail::read_le<double>(in);
    const double im = detail::read_le<double>(in);
    c = cplx(re, im);
  }
  sg.coi = cone_of_influence(sg.n, sg.dt);
  sg.signal_variance = std::numeric_limits<double>::quiet_NaN();
  sg.signal_lag1 = std::numeric_limits<double>::quiet_NaN();
  return sg;
}

/// Long format: scale,time,re,im,power,significant.
inline void write_scalogram_csv(std::ostream& out, const Scalogram& sg, const SignificanceMask* mask = nullptr) {
  out << "scale,time,re,im,power,significant\n";
  for (std::size_t j = 0; j < sg.scales(); ++j) {
    const std::string scale = format_double(sg.grid.scale(j));
    for (std::size_t t = 0; t < sg.n; ++t) {
      const cplx c = sg.at(j, t);
      out << scale << ',' << format_double(static_cast<double>(t) * sg.dt) << ',' << format_double(c.real()) << ','
          << format_double(c.imag()) << ',' << format_double(std::norm(c)) << ','
          << ((mask != nullptr && mask->at(j, t)) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace multiscale
