#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "multiscale/multiscale.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace multiscale;

namespace {

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / double(a.size()));
}

}  // namespace

TEST(TimeSeries, RejectsInvalid) {
  EXPECT_ERRC((TimeSeries({1.0}, 1.0)), Errc::TooShort);
  EXPECT_ERRC(((TimeSeries({1.0, 2.0}, 0.0))), Errc::InvalidArgument);
  EXPECT_ERRC(((TimeSeries({1.0, NAN}, 1.0))), Errc::InvalidArgument);
  ChannelMeta bad;
  bad.discharge_voltage = -1.0;
  EXPECT_ERRC(((TimeSeries({1.0, 2.0}, 1.0, bad))), Errc::InvalidArgument);
}

TEST(Profile, HandComputed) {
  const auto y = profile(TimeSeries({1.0, 2.0, 3.0}, 1.0));
  EXPECT_DOUBLE_EQ(y[0], -1.0);
  EXPECT_DOUBLE_EQ(y[1], -1.0);
  EXPECT_NEAR(y[2], 0.0, 1e-15);
}

TEST(Profile, ConstantIsZero) {
  const auto y = profile(TimeSeries(std::vector<double>(50, 3.25), 0.5));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(y.dt(), 0.5);
}

TEST(Profile, EndsAtZero) {
  const auto x = gen_white_noise(4096, Seed{3});
  double mx = 0.0;
  for (double v : x.values()) mx = std::max(mx, std::abs(v));
  EXPECT_LT(std::abs(profile(x)[4095]), 1e-9 * 4096 * mx);
}

TEST(Profile, EndsAtZeroRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(100 + rep * 37);
    double mx = 0.0;
    for (auto& v : x) {
      v = u(rng) + 5e3;
      mx = std::max(mx, std::abs(v));
    }
    const auto y = profile(TimeSeries(x, 1.0));
    EXPECT_LT(std::abs(y[y.size() - 1]), 1e-9 * double(x.size()) * mx);
  }
}

TEST(WhiteNoise, MeanWithinClt) {
  const auto x = gen_white_noise(4096, Seed{42});
  EXPECT_LT(std::abs(mean(x.samples())), 4.0 / std::sqrt(4096.0));
  EXPECT_EQ(x.dt(), 1.0);
}

TEST(WhiteNoise, Deterministic) {
  EXPECT_EQ(gen_white_noise(4096, Seed{42}), gen_white_noise(4096, Seed{42}));
  EXPECT_FALSE(gen_white_noise(64, Seed{1}) == gen_white_noise(64, Seed{2}));
}

TEST(WhiteNoise, TooShort) { EXPECT_ERRC(gen_white_noise(1, Seed{1}), Errc::TooShort); }

TEST(Fgn, AutocovarianceFormula) {
  EXPECT_DOUBLE_EQ(fgn_autocovariance(0.8, 0), 1.0);
  EXPECT_NEAR(fgn_autocovariance(0.5, 1), 0.0, 1e-15);
  EXPECT_NEAR(fgn_autocovariance(0.8, 1), 0.5 * (std::pow(2.0, 1.6) - 2.0), 1e-15);
}

TEST(Fgn, HalfIsWhite) {
  const auto x = gen_fgn(8192, 0.5, Seed{5});
  EXPECT_LT(std::abs(lag1_autocorrelation(x.samples())), 4.0 / std::sqrt(8192.0));
}

TEST(Fgn, UnitVariance) {
  for (double h : {0.2, 0.5, 0.8}) {
    const auto x = gen_fgn(1 << 14, h, Seed{7});
    EXPECT_NEAR(variance(x.samples()), 1.0, 0.1) << "H=" << h;
  }
}

TEST(Fgn, Lag1MatchesTheory) {
  const auto x = gen_fgn(1 << 15, 0.8, Seed{9});
  EXPECT_NEAR(lag1_autocorrelation(x.samples()), fgn_autocovariance(0.8, 1), 0.03);
}

TEST(Fgn, Deterministic) { EXPECT_EQ(gen_fgn(1000, 0.7, Seed{1}), gen_fgn(1000, 0.7, Seed{1})); }

TEST(Fgn, HurstOutOfRange) {
  EXPECT_ERRC((gen_fgn(1024, 1.2, Seed{1})), Errc::InvalidArgument);
  EXPECT_ERRC((gen_fgn(1024, 0.0, Seed{1})), Errc::InvalidArgument);
}

TEST(Cascade, SymmetricIsConstant) {
  const auto x = gen_binomial_cascade(10, 0.5, Seed{0});
  ASSERT_EQ(x.size(), 1024u);
  for (double v : x.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Cascade, AddressZero) {
  const auto x = gen_binomial_cascade(3, 0.75, Seed{0});
  EXPECT_NEAR(x[0], std::pow(0.75, 3) * 8.0, 1e-15);
  EXPECT_NEAR(x[7], std::pow(0.25, 3) * 8.0, 1e-15);
  EXPECT_NEAR(x[5], 0.25 * 0.75 * 0.25 * 8.0, 1e-15);
  EXPECT_NEAR(mean(x.samples()), 1.0, 1e-15);
}

TEST(Cascade, ShuffleKeepsValues) {
  auto a = gen_binomial_cascade(8, 0.6, Seed{1}).values();
  auto b = gen_binomial_cascade(8, 0.6, Seed{1}, true).values();
  EXPECT_NE(a, b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  EXPECT_EQ(gen_binomial_cascade(8, 0.6, Seed{4}, true), gen_binomial_cascade(8, 0.6, Seed{4}, true));
}

TEST(Cascade, Preconditions) {
  EXPECT_ERRC((gen_binomial_cascade(0, 0.6, Seed{0})), Errc::InvalidArgument);
  EXPECT_ERRC((gen_binomial_cascade(25, 0.6, Seed{0})), Errc::InvalidArgument);
  EXPECT_ERRC((gen_binomial_cascade(4, 1.0, Seed{0})), Errc::InvalidArgument);
}

TEST(Sine, QuarterSamples) {
  const auto x = gen_sine(4, 0.25, 1.0);
  const double want[] = {0.0, 1.0, 0.0, -1.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(x[i], want[i], 1e-12);
}

TEST(Sine, PhaseGivesCosine) {
  const auto x = gen_sine(64, 0.01, 3.0, 2.0, std::numbers::pi / 2);
  for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(x[k], 2.0 * std::cos(2 * std::numbers::pi * 3.0 * k * 0.01), 1e-12);
}

TEST(Sine, Aliased) {
  EXPECT_ERRC(gen_sine(16, 0.25, 3.0), Errc::Aliased);
  EXPECT_ERRC(gen_sine(16, 0.25, 2.0), Errc::Aliased);
  EXPECT_ERRC(gen_sine(16, 0.25, -1.0), Errc::InvalidArgument);
}

TEST(Sine, SumOfComponents) {
  const SineComponent parts[] = {{5.0, 1.0, 0.0}, {40.0, 0.5, 1.0}};
  const auto s = gen_sum_of_sines(256, 1e-3, parts);
  const auto a = gen_sine(256, 1e-3, 5.0), b = gen_sine(256, 1e-3, 40.0, 0.5, 1.0);
  for (std::size_t k = 0; k < 256; ++k) EXPECT_NEAR(s[k], a[k] + b[k], 1e-14);
}

TEST(Lowpass, RemovesHighSine) {
  const auto x = gen_sine(1000, 1e-3, 10.0);
  const auto y = lowpass(x, 5.0);
  EXPECT_LT(rms(y.values(), std::vector<double>(1000, 0.0)), 1e-6);
}

TEST(Lowpass, KeepsLowSine) {
  const auto x = gen_sine(1000, 1e-3, 1.0);
  EXPECT_LT(rms(lowpass(x, 5.0).values(), x.values()), 1e-6);
}

TEST(Lowpass, ConstantUnchanged) {
  const TimeSeries x(std::vector<double>(128, -2.5), 0.1);
  const auto y = lowpass(x, 1.0);
  for (double v : y.values()) EXPECT_NEAR(v, -2.5, 1e-14);
}

TEST(Lowpass, MatchesDirectDftFilter) {
  const auto x = gen_white_noise(96, Seed{8});
  const double cutoff = 0.2;
  const auto y = lowpass(x, cutoff);
  const std::size_t n = x.size();
  for (std::size_t t = 0; t < n; ++t) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t kk = std::min(k, n - k);
      if (double(kk) / double(n) > cutoff) continue;
      std::complex<double> xk = 0.0;
      for (std::size_t u = 0; u < n; ++u) xk += x[u] * std::polar(1.0, -2 * std::numbers::pi * double(k * u) / double(n));
      acc += xk * std::polar(1.0, 2 * std::numbers::pi * double(k * t) / double(n));
    }
    EXPECT_NEAR(y[t], acc.real() / double(n), 1e-10);
  }
}

TEST(Lowpass, IdempotentAndMeanPreserving) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto raw = gen_white_noise(777, Seed{seed});
    const auto x = raw.with_samples([&] {
      auto v = raw.values();
      for (auto& e : v) e += 3.0;
      return v;
    }());
    const auto once = lowpass(x, 0.1);
    const auto twice = lowpass(once, 0.1);
    double mx = 0.0;
    for (double v : once.values()) mx = std::max(mx, std::abs(v));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(twice[i], once[i], 1e-12 * mx);
    EXPECT_NEAR(mean(once.samples()), mean(x.samples()), 1e-12 * std::abs(mean(x.samples())));
  }
}

TEST(Lowpass, Preconditions) {
  const auto x = gen_sine(100, 1e-3, 10.0);
  EXPECT_ERRC(lowpass(x, 0.0), Errc::InvalidArgument);
  EXPECT_ERRC(lowpass(x, 500.0), Errc::InvalidArgument);
}

TEST(DelayEmbed, HandComputed) {
  const auto pts = delay_embed<2>(TimeSeries({1, 2, 3, 4}, 1.0), 1);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0], (std::array<double, 2>{1, 2}));
  EXPECT_EQ(pts[2], (std::array<double, 2>{3, 4}));
  const auto p3 = delay_embed<3>(TimeSeries({1, 2, 3, 4, 5}, 1.0), 2);
  ASSERT_EQ(p3.size(), 1u);
  EXPECT_EQ(p3[0], (std::array<double, 3>{1, 3, 5}));
}

TEST(DelayEmbed, ConstantCollapses) {
  for (const auto& p : delay_embed<3>(TimeSeries(std::vector<double>(20, 7.0), 1.0), 3))
    EXPECT_EQ(p, (std::array<double, 3>{7, 7, 7}));
}

TEST(DelayEmbed, SineTracesCircle) {
  const auto x = gen_sine(2048, 1.0, 1.0 / 64.0, 1.7);
  const std::size_t lag = default_embedding_lag(x);
  EXPECT_EQ(lag, 16u);
  const auto pts = delay_embed<2>(x, lag);
  std::vector<double> r;
  for (const auto& p : pts) r.push_back(std::hypot(p[0], p[1]));
  EXPECT_LT(std::sqrt(variance(r)) / mean(r), 0.01);
}

TEST(DelayEmbed, Errors) {
  const TimeSeries x({1, 2, 3}, 1.0);
  EXPECT_ERRC(delay_embed<2>(x, 0), Errc::InvalidArgument);
  EXPECT_ERRC(delay_embed<3>(x, 2), Errc::TooShort);
}
