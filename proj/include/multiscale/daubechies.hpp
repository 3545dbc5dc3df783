#pragma once

// Daubechies db1..db10 Mallat pyramid. With symmetric (half-sample) extension
// each level keeps floor((n + L - 1) / 2) coefficients and reconstruction is
// exact for any length; periodic extension keeps n / 2 coefficients and makes
// the transform orthonormal (requires n divisible by 2^levels).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "multiscale/error.hpp"
#include "multiscale/time_series.hpp"

namespace multiscale {

enum class Extension { Symmetric, Periodic };

namespace detail {

// Decomposition low-pass filters, dbN has 2N taps.
inline constexpr std::array<double, 2> kDb1{0.7071067811865476, 0.7071067811865476};
inline constexpr std::array<double, 4> kDb2{-0.12940952255126037, 0.2241438680420134, 0.8365163037378079,
                                            0.48296291314453416};
inline constexpr std::array<double, 6> kDb3{0.03522629188570953,  -0.08544127388202666, -0.13501102001025458,
                                            0.45987750211849154,  0.8068915093110925,   0.33267055295008263};
inline constexpr std::array<double, 8> kDb4{-0.010597401785069032, 0.0328830116668852,   0.030841381835560764,
                                            -0.18703481171909309,  -0.027983769416859854, 0.6308807679298589,
                                            0.7148465705529157,    0.2303778133088965};
inline constexpr std::array<double, 10> kDb5{0.0033357252854737712, -0.012580751999081999, -0.006241490212798274,
                                             0.07757149384004572,   -0.032244869584638375, -0.24229488706638203,
                                             0.13842814590132074,   0.7243085284377729,    0.6038292697971896,
                                             0.16010239797419293};
inline constexpr std::array<double, 12> kDb6{-0.0010773010853084796, 0.004777257510945511, 0.0005538422011614961,
                                             -0.03158203931748603,   0.027522865530305727, 0.09750160558732304,
                                             -0.12976686756726194,   -0.22626469396543983, 0.31525035170919763,
                                             0.7511339080210954,     0.49462389039845306,  0.11154074335010947};
inline constexpr std::array<double, 14> kDb7{0.00035371379997452024, -0.0018016407040474908, 0.0004295779729213665,
                                             0.01255099855609984,    -0.01657454163066688,   -0.03802993693501441,
                                             0.08061260915108308,    0.07130921926683026,    -0.22403618499387498,
                                             -0.14390600392856498,   0.4697822874051931,     0.7291320908462351,
                                             0.3965393194819173,     0.07785205408500918};
inline constexpr std::array<double, 16> kDb8{
    -0.00011747678412476953, 0.0006754494064505693, -0.00039174037337694705, -0.004870352993451574,
    0.008746094047405777,    0.013981027917398282,  -0.044088253930794755,   -0.017369301001807547,
    0.12874742662047847,     0.0004724845739132828, -0.2840155429615469,     -0.015829105256349306,
    0.5853546836542067,      0.6756307362972898,    0.31287159091429995,     0.05441584224310401};
inline constexpr std::array<double, 18> kDb9{
    3.93473203162716e-05,  -0.0002519631889427101, 0.00023038576352319597, 0.0018476468830562265,
    -0.00428150368246343,  -0.004723204757751397,  0.022361662123679096,   0.00025094711483145197,
    -0.06763282906132997,  0.03072568147933338,    0.14854074933810638,    -0.09684078322297646,
    -0.2932737832791749,   0.13319738582500756,    0.6572880780513005,     0.6048231236901112,
    0.24383467461259034,   0.038077947363878345};
inline constexpr std::array<double, 20> kDb10{
    -1.3264202894521244e-05, 9.358867032006959e-05, -0.00011646685512928545, -0.0006858566949597116,
    0.001992405295185056,    0.001395351747052901,  -0.010733175483330575,   0.0036065535669561697,
    0.033212674059341,       -0.029457536821875813, -0.07139414716639708,    0.09305736460357235,
    0.12736934033579325,     -0.19594627437737705,  -0.24984642432731538,    0.2811723436605775,
    0.6884590394536035,      0.5272011889317256,    0.1881768000776915,      0.026670057900555554};

inline std::span<const double> db_lowpass(int order) {
  switch (order) {
    case 1: return kDb1;
    case 2: return kDb2;
    case 3: return kDb3;
    case 4: return kDb4;
    case 5: return kDb5;
    case 6: return kDb6;
    case 7: return kDb7;
    case 8: return kDb8;
    case 9: return kDb9;
    case 10: return kDb10;
    default: throw Error(Errc::BadOrder, "Daubechies order must lie in 1..10, got " + std::to_string(order));
  }
}

// Half-sample symmetric reflection: x[-1] = x[0], x[n] = x[n-1].
inline std::size_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - 1 - i;
  return static_cast<std::size_t>(i);
}

inline std::size_t wrap_index(std::ptrdiff_t i, std::ptrdiff_t n) { return static_cast<std::size_t>(((i % n) + n) % n); }

}  // namespace detail

/// Decomposition filter pair of dbN: lowpass h and highpass g[k] = (-1)^(k+1) h[L-1-k].
struct DaubechiesFilter {
  std::vector<double> lo;
  std::vector<double> hi;

  explicit DaubechiesFilter(int order) {
    const auto h = detail::db_lowpass(order);
    lo.assign(h.begin(), h.end());
    hi.resize(lo.size());
    const std::size_t len = lo.size();
    for (std::size_t k = 0; k < len; ++k) hi[k] = (k % 2 == 0 ? -1.0 : 1.0) * lo[len - 1 - k];
  }
  std::size_t length() const noexcept { return lo.size(); }
};

inline std::size_t max_dwt_levels(std::size_t n, int order) {
  const std::size_t taps = 2 * static_cast<std::size_t>(order);
  if (n < 2 * taps) return 0;
  return static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n) / static_cast<double>(taps))));
}

struct DWTCoeffs {
  std::vector<std::vector<double>> details;  // details[0] is the finest level
  std::vector<double> approximation;
  std::vector<std::size_t> input_lengths;  // signal length entering each level
  int order = 2;
  Extension extension = Extension::Symmetric;

  std::size_t levels() const noexcept { return details.size(); }
  std::size_t total_size() const noexcept {
    std::size_t s = approximation.size();
    for (const auto& d : details) s += d.size();
    return s;
  }
};

namespace detail {

inline void analysis_step(std::span<const double> x, const DaubechiesFilter& f, Extension ext, std::vector<double>& a,
                          std::vector<double>& d) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto taps = static_cast<std::ptrdiff_t>(f.length());
  const std::size_t out = ext == Extension::Periodic ? x.size() / 2 : (x.size() + f.length() - 1) / 2;
  a.assign(out, 0.0);
  d.assign(out, 0.0);
  for (std::size_t i = 0; i < out; ++i) {
    double sa = 0.0, sd = 0.0;
    for (std::ptrdiff_t j = 0; j < taps; ++j) {
      const std::ptrdiff_t t = 2 * static_cast<std::ptrdiff_t>(i) + 1 - j;
      const double v = ext == Extension::Periodic ? x[wrap_index(t + taps / 2 - 1, n)] : x[reflect(t, n)];
      sa += f.lo[static_cast<std::size_t>(j)] * v;
      sd += f.hi[static_cast<std::size_t>(j)] * v;
    }
    a[i] = sa;
    d[i] = sd;
  }
}

inline std::vector<double> synthesis_step(std::span<const double> a, std::span<const double> d,
                                          const DaubechiesFilter& f, Extension ext, std::size_t n) {
  const auto taps = static_cast<std::ptrdiff_t>(f.length());
  std::vector<double> x(n, 0.0);
  if (ext == Extension::Periodic) {
    const auto len = static_cast<std::ptrdiff_t>(n);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::ptrdiff_t j = 0; j < taps; ++j) {
        const auto t = wrap_index(2 * static_cast<std::ptrdiff_t>(i) + taps / 2 - j, len);
        x[t] += f.lo[static_cast<std::size_t>(j)] * a[i] + f.hi[static_cast<std::size_t>(j)] * d[i];
      }
    return x;
  }
  // Sample m of the signal sits at index m + L - 2 of the full upsampled
  // convolution with the time-reversed filters.
  const auto count = static_cast<std::ptrdiff_t>(a.size());
  for (std::size_t m = 0; m < n; ++m) {
    const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(m) + taps - 2;
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, (t - taps + 1) / 2);
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(count - 1, t / 2);
    double s = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      const std::ptrdiff_t r = t - 2 * k;  // index into the reconstruction filter
      if (r < 0 || r >= taps) continue;
      const auto j = static_cast<std::size_t>(taps - 1 - r);
      s += f.lo[j] * a[static_cast<std::size_t>(k)] + f.hi[j] * d[static_cast<std::size_t>(k)];
    }
    x[m] = s;
  }
  return x;
}

}  // namespace detail

inline DWTCoeffs dwt(std::span<const double> x, int order, std::size_t levels, Extension ext = Extension::Symmetric) {
  const DaubechiesFilter filter(order);
  require(levels >= 1, Errc::InvalidArgument, "DWT needs at least one level");
  require(levels <= max_dwt_levels(x.size(), order), Errc::TooShort,
          "series too short for " + std::to_string(levels) + " levels of db" + std::to_string(order));
  if (ext == Extension::Periodic)
    require(x.size() % (std::size_t{1} << levels) == 0, Errc::InvalidArgument,
            "periodic extension needs a length divisible by 2^levels");
  DWTCoeffs c;
  c.order = order;
  c.extension = ext;
  std::vector<double> current(x.begin(), x.end());
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<double> a, d;
    detail::analysis_step(current, filter, ext, a, d);
    c.input_lengths.push_back(current.size());
    c.details.push_back(std::move(d));
    current = std::move(a);
  }
  c.approximation = std::move(current);
  return c;
}

inline DWTCoeffs dwt(const TimeSeries& ts, int order, std::size_t levels, Extension ext = Extension::Symmetric) {
  return dwt(ts.samples(), order, levels, ext);
}

inline std::vector<double> idwt(const DWTCoeffs& c) {
  const DaubechiesFilter filter(c.order);
  require(c.details.size() == c.input_lengths.size(), Errc::InvalidArgument, "inconsistent DWT coefficient levels");
  std::vector<double> current = c.approximation;
  for (std::size_t l = c.levels(); l-- > 0;) {
    require(c.details[l].size() == current.size(), Errc::LengthMismatch, "detail/approximation length mismatch");
    current = detail::synthesis_step(current, c.details[l], filter, c.extension, c.input_lengths[l]);
  }
  return current;
}

/// Low-pass part of x: reconstruction from the level-`levels` approximation
/// with every detail band zeroed.
inline std::vector<double> dwt_trend(std::span<const double> x, int order, std::size_t levels,
                                     Extension ext = Extension::Symmetric) {
  auto c = dwt(x, order, levels, ext);
  for (auto& d : c.details) std::fill(d.begin(), d.end(), 0.0);
  return idwt(c);
}

inline nlohmann::json to_json(const DWTCoeffs& c) {
  return {{"order", c.order},
          {"extension", c.extension == Extension::Symmetric ? "symmetric" : "periodic"},
          {"details", c.details},
          {"approximation", c.approximation},
          {"input_lengths", c.input_lengths}};
}

}  // namespace multiscale
