#pragma once

// Independent reference implementations. Deliberately slow and direct; they
// share no code with the library beyond the TimeSeries container.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// One-sided raw periodogram by explicit O(n^2) DFT, DC excluded.
inline std::vector<double> dft_periodogram(const std::vector<double>& x, double dt) {
  const std::size_t n = x.size();
  std::vector<double> p;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    cplx acc = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k) * double(t) / double(n));
    const double c = (2 * k == n) ? 1.0 : 2.0;
    p.push_back(c * std::norm(acc) * dt / double(n));
  }
  return p;
}

// R/S with every window's profile rebuilt from scratch per sample.
inline double naive_rs_window(const std::vector<double>& x, std::size_t start, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += x[start + i];
  m /= double(n);
  double r_max = -1e300, r_min = 1e300;
  for (std::size_t k = 0; k < n; ++k) {
    double y = 0.0;
    for (std::size_t i = 0; i <= k; ++i) y += x[start + i] - m;
    r_max = std::max(r_max, y);
    r_min = std::min(r_min, y);
  }
  r_max = std::max(r_max, 0.0);
  r_min = std::min(r_min, 0.0);
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) v += (x[start + i] - m) * (x[start + i] - m);
  return (r_max - r_min) / std::sqrt(v / double(n));
}

inline double naive_rs_hurst(const std::vector<double>& x, const std::vector<std::size_t>& windows) {
  std::vector<double> lx, ly;
  for (std::size_t n : windows) {
    double total = 0.0;
    const std::size_t count = x.size() / n;
    for (std::size_t w = 0; w < count; ++w) total += naive_rs_window(x, w * n, n);
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(total / double(count)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// W(s, t) = sqrt(dt / s) * sum_n x_n conj(psi((n - t) dt / s)), Morlet psi.
inline cplx direct_cwt(const std::vector<double>& x, double dt, double scale, double omega0, std::size_t t) {
  const double norm = std::pow(std::numbers::pi, -0.25);
  cplx acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double eta = (double(n) - double(t)) * dt / scale;
    acc += x[n] * std::conj(norm * std::polar(std::exp(-0.5 * eta * eta), omega0 * eta));
  }
  return acc * std::sqrt(dt / scale);
}

// Binomial cascade scaling function.
inline double cascade_tau(double q, double p) { return -std::log2(std::pow(p, q) + std::pow(1.0 - p, q)); }

inline double cascade_h(double q, double p) { return (cascade_tau(q, p) + 1.0) / q; }

inline double cascade_alpha(double q, double p) {
  const double a = std::pow(p, q), b = std::pow(1.0 - p, q);
  return -(a * std::log2(p) + b * std::log2(1.0 - p)) / (a + b);
}

// Centered finite-difference slope of log E against log f.
template <typename F>
double log_slope(F&& e, double f, double h = 1e-5) {
  return (std::log(e(f * std::exp(h))) - std::log(e(f * std::exp(-h)))) / (2.0 * h);
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b, std::size_t lo, std::size_t hi) {
  double ma = 0, mb = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(hi - lo);
  mb /= double(hi - lo);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
