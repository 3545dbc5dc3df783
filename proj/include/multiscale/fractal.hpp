#pragma once

// Rescaled-range (R/S) Hurst estimation and multifractal detrended fluctuation
// analysis with either per-segment polynomial or Daubechies wavelet detrending.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "multiscale/daubechies.hpp"
#include "multiscale/error.hpp"
#include "multiscale/io.hpp"
#include "multiscale/parallel.hpp"
#include "multiscale/regression.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

struct RSResult {
  std::vector<std::size_t> window_sizes;
  std::vector<double> rs_values;  // mean R/S per window size
  double hurst = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
};

/// Mean R/S over the floor(N/n) disjoint windows of length n.
inline double mean_rescaled_range(std::span<const double> x, std::size_t n) {
  const std::size_t windows = x.size() / n;
  double total = 0.0;
  for (std::size_t w = 0; w < windows; ++w) {
    const auto seg = x.subspan(w * n, n);
    const double m = mean(seg);
    double acc = 0.0, lo = 0.0, hi = 0.0, ss = 0.0;
    for (double v : seg) {
      acc += v - m;
      lo = std::min(lo, acc);
      hi = std::max(hi, acc);
      ss += (v - m) * (v - m);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    require(sd > 0.0, Errc::DegenerateWindow,
            "zero standard deviation in window " + std::to_string(w) + " of size " + std::to_string(n));
    total += (hi - lo) / sd;
  }
  return total / static_cast<double>(windows);
}

inline RSResult rescaled_range(const TimeSeries& ts, std::vector<std::size_t> window_sizes) {
  std::sort(window_sizes.begin(), window_sizes.end());
  window_sizes.erase(std::unique(window_sizes.begin(), window_sizes.end()), window_sizes.end());
  require(window_sizes.size() >= 4, Errc::TooFewScales, "R/S needs at least 4 window sizes");
  require(window_sizes.front() >= 8, Errc::InvalidArgument, "R/S windows must hold at least 8 samples");
  require(window_sizes.back() <= ts.size() / 2, Errc::InvalidArgument, "largest R/S window exceeds half the series");

  RSResult res;
  res.window_sizes = window_sizes;
  res.rs_values.resize(window_sizes.size());
  parallel_for(window_sizes.size(),
               [&](std::size_t i) { res.rs_values[i] = mean_rescaled_range(ts.samples(), window_sizes[i]); });
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < window_sizes.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(window_sizes[i])));
    ly.push_back(std::log(res.rs_values[i]));
  }
  const auto fit = ols(lx, ly);
  res.hurst = fit.slope;
  res.stderr_ = fit.slope_stderr;
  res.intercept = fit.intercept;
  return res;
}

/// Dyadic window ladder lo, 2 lo, 4 lo, ... <= hi.
inline std::vector<std::size_t> dyadic_sizes(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t s = lo; s <= hi && s > 0; s *= 2) out.push_back(s);
  return out;
}

/// Samples at each end of a wavelet-detrended residual that are affected by
/// the boundary extension and excluded from fluctuation statistics.
inline std::size_t detrend_margin(int order, std::size_t level) {
  const std::size_t taps = 2 * static_cast<std::size_t>(order);
  return ((std::size_t{1} << level) - 1) * (taps - 1) + 1;
}

/// x minus its Daubechies approximation at `level` (all details zeroed).
inline TimeSeries wavelet_detrend(const TimeSeries& ts, int order, std::size_t level) {
  require(level >= 1, Errc::InvalidArgument, "detrend level must be >= 1");
  const auto trend = dwt_trend(ts.samples(), order, level);
  std::vector<double> r(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) r[i] = ts[i] - trend[i];
  return ts.with_samples(std::move(r));
}

struct PolynomialDetrend {
  int order = 1;
};

/// level == 0 selects the level per scale as floor(log2 s) - 2, so the
/// approximation's cutoff period (about 2^(level+1) samples) is half the
/// segment length; scales should then be powers of two.
struct WaveletDetrend {
  int order = 2;
  std::size_t level = 0;
};

using Detrend = std::variant<PolynomialDetrend, WaveletDetrend>;

struct MFDFAResult {
  std::vector<std::size_t> scales;
  std::vector<double> q_values;          // ascending, 0 excluded
  std::vector<std::vector<double>> Fq;   // Fq[q index][scale index]
  std::vector<double> hq;
  std::vector<double> hq_stderr;
  std::vector<double> tau;               // q h(q) - 1
  std::vector<double> alpha_sing;        // d tau / d q
  std::vector<double> f_alpha;           // q alpha - tau

  double h_at(double q) const {
    for (std::size_t i = 0; i < q_values.size(); ++i)
      if (q_values[i] == q) return hq[i];
    throw Error(Errc::InvalidArgument, "q = " + format_double(q) + " not in the result");
  }
};

namespace detail {

// Squared fluctuation of each forward and reverse segment of length s.
inline std::vector<double> segment_variances(std::span<const double> y, std::size_t s, const PolynomialDetrend& pd) {
  require(pd.order >= 0 && pd.order <= 5, Errc::InvalidArgument, "polynomial detrend order must lie in 0..5");
  const auto cols = static_cast<Eigen::Index>(pd.order + 1);
  Eigen::MatrixXd vander(static_cast<Eigen::Index>(s), cols);
  for (std::size_t i = 0; i < s; ++i) {
    const double t = s > 1 ? 2.0 * static_cast<double>(i) / static_cast<double>(s - 1) - 1.0 : 0.0;
    double p = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c, p *= t) vander(static_cast<Eigen::Index>(i), c) = p;
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(vander);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(s), cols);

  const std::size_t count = y.size() / s;
  std::vector<double> out;
  out.reserve(2 * count);
  const auto fluct = [&](std::size_t start) {
    const Eigen::Map<const Eigen::VectorXd> seg(y.data() + start, static_cast<Eigen::Index>(s));
    const Eigen::VectorXd resid = seg - q * (q.transpose() * seg);
    return resid.squaredNorm() / static_cast<double>(s);
  };
  for (std::size_t v = 0; v < count; ++v) out.push_back(fluct(v * s));
  for (std::size_t v = 0; v < count; ++v) out.push_back(fluct(y.size() - (v + 1) * s));
  return out;
}

inline std::vector<double> residual_segment_variances(std::span<const double> resid, std::size_t s) {
  const std::size_t count = resid.size() / s;
  std::vector<double> out;
  out.reserve(2 * count);
  const auto ms = [&](std::size_t start) {
    double acc = 0.0;
    for (std::size_t i = start; i < start + s; ++i) acc += resid[i] * resid[i];
    return acc / static_cast<double>(s);
  };
  for (std::size_t v = 0; v < count; ++v) out.push_back(ms(v * s));
  for (std::size_t v = 0; v < count; ++v) out.push_back(ms(resid.size() - (v + 1) * s));
  return out;
}

inline std::size_t auto_wavelet_level(std::size_t s) {
  const auto l = static_cast<std::ptrdiff_t>(std::floor(std::log2(static_cast<double>(s)))) - 2;
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, l));
}

inline std::vector<double> segment_variances(std::span<const double> y, std::size_t s, const WaveletDetrend& wd) {
  const std::size_t level = wd.level == 0 ? auto_wavelet_level(s) : wd.level;
  const auto trend = dwt_trend(y, wd.order, level);
  const std::size_t margin = detrend_margin(wd.order, level);
  require(y.size() > 2 * margin + s, Errc::TooShort, "series too short for wavelet detrending at scale " + std::to_string(s));
  std::vector<double> resid(y.size() - 2 * margin);
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = y[margin + i] - trend[margin + i];
  return residual_segment_variances(resid, s);
}

// log of the mean of v^(q/2), computed in log space.
inline double log_mean_power(std::span<const double> log_var, double q) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double lv : log_var) peak = std::max(peak, 0.5 * q * lv);
  double s = 0.0;
  for (double lv : log_var) s += std::exp(0.5 * q * lv - peak);
  return peak + std::log(s / static_cast<double>(log_var.size()));
}

}  // namespace detail

/// Input must already be a profile (see profile()). F_q(s) uses both forward
/// and reverse segmentations; h(q) is the OLS slope of ln F_q vs ln s over
/// the full scale list.
inline MFDFAResult mfdfa(const TimeSeries& prof, std::vector<std::size_t> scales, std::vector<double> q_values,
                         const Detrend& detrend = PolynomialDetrend{}) {
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  std::sort(q_values.begin(), q_values.end());
  q_values.erase(std::unique(q_values.begin(), q_values.end()), q_values.end());
  require(scales.size() >= 6, Errc::TooFewScales, "MFDFA needs at least 6 scales");
  require(scales.front() >= 16 && scales.back() <= prof.size() / 4, Errc::InvalidArgument,
          "MFDFA scales must lie within [16, N/4]");
  require(!q_values.empty(), Errc::InvalidArgument, "MFDFA needs at least one q");
  for (double q : q_values)
    require(q != 0.0 && std::abs(q) <= 10.0 && std::isfinite(q), Errc::InvalidArgument,
            "q must be nonzero with |q| <= 10");

  std::vector<std::vector<double>> log_var(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) {
    const auto vars =
        std::visit([&](const auto& d) { return detail::segment_variances(prof.samples(), scales[i], d); }, detrend);
    auto& lv = log_var[i];
    lv.reserve(vars.size());
    for (double v : vars) {
      require(v > 0.0, Errc::NonPositiveVariance, "zero fluctuation in a segment of scale " + std::to_string(scales[i]));
      lv.push_back(std::log(v));
    }
  });

  MFDFAResult res;
  res.scales = scales;
  res.q_values = q_values;
  std::vector<double> ls;
  for (auto s : scales) ls.push_back(std::log(static_cast<double>(s)));
  for (double q : q_values) {
    std::vector<double> lf(scales.size()), f(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) {
      lf[i] = detail::log_mean_power(log_var[i], q) / q;
      f[i] = std::exp(lf[i]);
    }
    const auto fit = ols(ls, lf);
    res.Fq.push_back(std::move(f));
    res.hq.push_back(fit.slope);
    res.hq_stderr.push_back(fit.slope_stderr);
    res.tau.push_back(q * fit.slope - 1.0);
  }

  const std::size_t nq = q_values.size();
  res.alpha_sing.resize(nq);
  res.f_alpha.resize(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    if (nq == 1) {
      res.alpha_sing[i] = res.hq[i];
    } else {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = i + 1 == nq ? i : i + 1;
      res.alpha_sing[i] = (res.tau[hi] - res.tau[lo]) / (q_values[hi] - q_values[lo]);
    }
    res.f_alpha[i] = q_values[i] * res.alpha_sing[i] - res.tau[i];
  }
  return res;
}

/// Width of the singularity spectrum, max alpha - min alpha.
inline double multifractality_width(const MFDFAResult& res) {
  require(res.q_values.size() >= 3, Errc::InvalidArgument, "multifractality width needs at least 3 q values");
  const auto [lo, hi] = std::minmax_element(res.alpha_sing.begin(), res.alpha_sing.end());
  return *hi - *lo;
}

inline nlohmann::json to_json(const RSResult& r) {
  return {{"window_sizes", r.window_sizes},
          {"rs_values", r.rs_values},
          {"hurst", r.hurst},
          {"stderr", r.stderr_},
          {"intercept", r.intercept}};
}

inline nlohmann::json to_json(const MFDFAResult& r) {
  return {{"scales", r.scales}, {"q_values", r.q_values}, {"Fq", r.Fq},         {"hq", r.hq},
          {"hq_stderr", r.hq_stderr}, {"tau", r.tau},     {"alpha", r.alpha_sing}, {"f_alpha", r.f_alpha}};
}

/// Long format for plotting: scale,q,Fq.
inline void write_csv(std::ostream& out, const MFDFAResult& r) {
  out << "scale,q,Fq\n";
  for (std::size_t qi = 0; qi < r.q_values.size(); ++qi)
    for (std::size_t si = 0; si < r.scales.size(); ++si)
      out << r.scales[si] << ',' << format_double(r.q_values[qi]) << ',' << format_double(r.Fq[qi][si]) << '\n';
}

inline void write_csv(std::ostream& out, const RSResult& r) {
  out << "window,rs\n";
  for (std::size_t i = 0; i < r.window_sizes.size(); ++i)
    out << r.window_sizes[i] << ',' << format_double(r.rs_values[i]) << '\n';
}

}  // namespace multiscale
