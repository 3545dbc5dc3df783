// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "multiscale/multiscale.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace multiscale;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs < limit_s, "time " + num(secs, 3) + " s < " + num(limit_s) + " s");
  if (!o.pass) ++failures;
  std::printf("%s  [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

const std::vector<double> kQ = {-5, -4, -3, -2, -1, 1, 2, 3, 4, 5};

PowerSpectrum log_spaced(std::size_t n, double lo, double hi, const std::function<double(double)>& e) {
  PowerSpectrum s;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = lo * std::pow(hi / lo, double(i) / double(n - 1));
    s.freqs.push_back(f);
    s.power.push_back(e(f));
  }
  s.df = s.freqs[1] - s.freqs[0];
  return s;
}

Outcome hurst_chain() {
  Outcome o;
  const auto x = gen_fgn(1 << 14, 0.8, Seed{7});
  const double rs = rescaled_range(x, dyadic_sizes(16, 4096)).hurst;
  const double h2 = mfdfa(profile(x), dyadic_sizes(16, 4096), {2}).h_at(2);
  const auto spec = periodogram(profile(x));
  const auto band = default_fit_band(spec);
  const double hs = hurst_from_alpha(fit_power_law(spec, band.lo, band.hi).alpha).hurst;
  o.check(std::abs(rs - 0.8) <= 0.1, "R/S " + num(rs));
  o.check(std::abs(h2 - 0.8) <= 0.1, "h(2) " + num(h2));
  o.check(std::abs(hs - 0.8) <= 0.15, "spectral " + num(hs));
  return o;
}

Outcome white_noise() {
  Outcome o;
  const auto x = gen_white_noise(1 << 14, Seed{42});
  const double rs = rescaled_range(x, dyadic_sizes(16, 4096)).hurst;
  const auto mf = mfdfa(profile(x), dyadic_sizes(16, 4096), kQ);
  o.check(std::abs(rs - 0.5) <= 0.07, "R/S " + num(rs));
  o.check(spread(mf.hq) < 0.1, "h(q) spread " + num(spread(mf.hq)));
  double fpr = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto w = gen_white_noise(2048, Seed{seed});
    const auto sg = cwt_morlet(w, ScaleGrid::default_for(2048, 1.0));
    const auto mask = significance_mask(sg, 0.95);
    std::size_t hit = 0, total = 0;
    for (std::size_t j = 0; j < sg.scales(); ++j)
      for (std::size_t t = 0; t < sg.n; ++t)
        if (sg.inside_coi(j, t)) ++total, hit += mask.at(j, t) ? 1 : 0;
    fpr += double(hit) / double(total) / 20.0;
  }
  o.check(std::abs(fpr - 0.05) <= 0.02, "FPR " + num(fpr));
  return o;
}

Outcome cascade() {
  Outcome o;
  const double p = 0.6;
  const auto res = mfdfa(profile(gen_binomial_cascade(16, p, Seed{0})), dyadic_sizes(16, 16384), kQ);
  double worst = 0.0;
  for (double q : {-5.0, -3.0, -1.0, 1.0, 3.0, 5.0}) worst = std::max(worst, std::abs(res.h_at(q) - oracle::cascade_h(q, p)));
  o.check(worst <= 0.05, "max |h - analytic| " + num(worst));
  bool concave = true;
  for (std::size_t i = 1; i + 1 < res.tau.size(); ++i) {
    const double ql = res.q_values[i - 1], qc = res.q_values[i], qr = res.q_values[i + 1];
    concave &= (res.tau[i + 1] - res.tau[i]) / (qr - qc) - (res.tau[i] - res.tau[i - 1]) / (qc - ql) <= 1e-9;
  }
  o.check(concave, "tau concave");
  return o;
}

Outcome heisenberg() {
  Outcome o;
  const auto clean = log_spaced(512, 1.0, 1e4, [](double f) { return heisenberg_model(f, 1.0, 100.0); });
  const auto fit = fit_heisenberg(clean, 1.0, 1e4);
  const double self = std::max(std::abs(fit.amplitude - 1.0), std::abs(fit.k_d / 100.0 - 1.0));
  o.check(self <= 1e-6, "self-fit rel err " + num(self));
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.1);
    const auto noisy = log_spaced(512, 1.0, 1e4, [&](double f) { return heisenberg_model(f, 1.0, 100.0) * (1.0 + g(rng)); });
    worst = std::max(worst, std::abs(fit_heisenberg(noisy, 1.0, 1e4).k_d / 100.0 - 1.0));
  }
  o.check(worst <= 0.1, "noisy k_d worst rel err " + num(worst));
  const auto model = [&](double f) { return heisenberg_model(f, fit.amplitude, fit.k_d); };
  const double lo = oracle::log_slope(model, fit.k_d / 100.0), hi = oracle::log_slope(model, fit.k_d * 100.0);
  o.check(std::abs(lo + 5.0 / 3.0) <= 0.02, "slope at k_d/100 " + num(lo));
  o.check(std::abs(hi + 7.0) <= 0.02, "slope at 100 k_d " + num(hi));
  return o;
}

Outcome cwt() {
  Outcome o;
  auto noise = gen_white_noise(512, Seed{17}).values();
  const double m = mean(noise);
  for (auto& v : noise) v -= m;
  const auto grid = ScaleGrid::spanning(4.0, 0.25, 128.0);
  const auto sg = cwt_morlet(TimeSeries(noise, 1.0), grid);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.count; ++j)
    for (std::size_t t = 0; t < 512; ++t)
      worst = std::max(worst, std::abs(sg.at(j, t) - oracle::direct_cwt(noise, 1.0, grid.scale(j), 6.0, t)));
  o.check(worst < 1e-8, "direct diff " + num(worst));

  const auto sine = cwt_morlet(gen_sine(4096, 1.0, 1.0 / 64.0), ScaleGrid::default_for(4096, 1.0));
  const auto peak = peak_scales(sine, 1);
  const double ff = sine.params().fourier_factor();
  const double miss = peak.empty() ? 1e9 : std::abs(std::log2(peak[0] * ff / 64.0));
  o.check(miss < sine.grid.dj, "sine peak off by " + num(miss) + " octaves");

  const SineComponent parts[] = {{1.0 / 64.0, 1.0, 0.0}, {1.0 / 512.0, 1.0, 0.0}};
  const auto two = cwt_morlet(gen_sum_of_sines(8192, 1.0, parts), ScaleGrid::default_for(8192, 1.0));
  const auto peaks = spectrum_peaks(global_spectrum(two));
  o.check(peaks.size() == 2, "two-sine peaks " + std::to_string(peaks.size()));
  return o;
}

Outcome dwt_checks() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int order = 1; order <= 10; ++order)
    for (std::size_t n : {1000, 1024, 4097}) {
      std::vector<double> x(n);
      for (auto& v : x) v = u(rng);
      const auto y = idwt(dwt(x, order, std::min<std::size_t>(5, max_dwt_levels(n, order))));
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - y[i])), scale = std::max(scale, std::abs(x[i]));
      worst = std::max(worst, err / scale);
    }
  o.check(worst < 1e-10, "reconstruction rel err " + num(worst));
  std::vector<double> ramp(1024);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.5 * double(i) - 3.0;
  const auto c = dwt(ramp, 2, 5);
  double interior = 0.0;
  for (const auto& d : c.details)
    for (std::size_t i = 2; i + 2 < d.size(); ++i) interior = std::max(interior, std::abs(d[i]));
  o.check(interior < 1e-10, "db2 ramp interior detail " + num(interior));
  return o;
}

Outcome phase() {
  Outcome o;
  const double f = 1.0 / 64.0, s = 64.0 / MorletParams{}.fourier_factor();
  const auto a = phase_at_scale(gen_sine(4096, 1.0, f), s);
  const auto b = phase_at_scale(gen_sine(4096, 1.0, f, 1.0, std::numbers::pi / 3.0), s);
  const auto d = phase_difference(b, a);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < d.delta.size(); ++k)
    if (d.coi_valid[k]) sum += d.delta[k], ++n;
  o.check(std::abs(sum / double(n) - std::numbers::pi / 3.0) <= 0.05, "offset " + num(sum / double(n)));

  // channel b detunes outside [start, end)
  const std::size_t len = 4096, start = 1365, end = 2730, min_duration = 64;
  std::vector<double> x(len);
  double ph = 0.3;
  for (std::size_t t = 0; t < len; ++t) {
    x[t] = std::sin(ph);
    ph += 2.0 * std::numbers::pi * (t < start ? 1.15 * f : (t < end ? f : 0.85 * f));
  }
  const auto lock = detect_locking(phase_difference(a, phase_at_scale(TimeSeries(x, 1.0), s)), 0.5, min_duration);
  bool found = lock.locking_intervals.size() == 1;
  if (found) {
    const auto iv = lock.locking_intervals[0];
    found = std::abs(double(iv.start) - double(start)) <= 2.0 * min_duration &&
            std::abs(double(iv.end) - double(end)) <= 2.0 * min_duration;
  }
  o.check(found, "episode " + std::to_string(lock.locking_intervals.size()) + " interval(s)");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<double> wa, wb;
  bool invariants = true;
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng), q = u(rng);
    const double w = wrap_phase(p);
    invariants &= w > -std::numbers::pi && w <= std::numbers::pi && wrap_phase(w) == w;
    invariants &= std::abs(std::remainder(p - w, 2.0 * std::numbers::pi)) < 1e-9;
    wa.push_back(w);
    wb.push_back(wrap_phase(q));
  }
  auto pa = unwrap_phases(wa), pb = unwrap_phases(wb);
  pa.scale = pb.scale = 1.0;
  const auto ab = phase_difference(pa, pb), ba = phase_difference(pb, pa);
  for (std::size_t k = 0; k < 1000; ++k) invariants &= std::abs(wrap_phase(ab.delta[k] + ba.delta[k])) < 1e-12;
  o.check(invariants, "wrap and antisymmetry on 1000 inputs");
  return o;
}

// ---------------------------------------------------------------- CLI

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs every CLI fixture inside `dir`; stdout summaries land in dir/summaries.txt.
bool run_fixtures(const fs::path& dir, const std::string& threads) {
  fs::create_directories(dir);
  std::ofstream(dir / "spec.csv") << [] {
    std::string s = "freq,power\n";
    for (int k = 1; k <= 500; ++k) s += format_double(0.25 * k) + "," + format_double(1.0 / (0.0625 * k * k)) + "\n";
    return s;
  }();
  std::ofstream(dir / "zero.csv") << [] {
    std::string s;
    for (int i = 0; i < 1024; ++i) s += "0\n";
    return s;
  }();
  std::ofstream(dir / "two.cfg") << "pipeline.steps = spectrum, cwt\ncwt.s0 = 2dt\ncwt.dj = 0.125\n";
  std::ofstream(dir / "chain.cfg") << "pipeline.steps = profile, powerlaw, rs, mfdfa, cwt, phase\n"
                                      "powerlaw.profile = true\nrs.windows = 16..1024\ncwt.sig = 0.95\n"
                                      "phase.scale = 64dt\nphase.ref = ref.csv\n";
  const std::vector<std::string> commands = {
      "gen sine --n 4096 --dt 1e-3 --f 50",
      "gen fgn --h 0.8 --seed 7",
      "gen white --n 16384 --seed 3",
      "gen sum-of-sines --n 4096 --f 0.015625,0.001953125 --output two.csv",
      "powerlaw spec.csv --dt 1e-3 --fmin 1 --fmax 100",
      "rs white.csv --windows 16..4096",
      "cwt zero.csv --s0 2dt --dj 0.125 --sig 0.95",
      "pipeline two.csv --config two.cfg",
      "gen fgn --h 0.6 --seed 9 --output ref.csv",
      "pipeline fgn.csv --config chain.cfg",
  };
  bool ok = true;
  for (const auto& c : commands) {
    std::string cmd = "cd '" + dir.string() + "' && MULTISCALE_THREADS=" + threads + " '" MULTISCALE_CLI "' " + c;
    ok &= std::system((cmd + " >> summaries.txt 2>> errors.txt").c_str()) == 0;
  }
  return ok;
}

Outcome cli_determinism() {
  Outcome o;
  const auto root = fs::temp_directory_path() / ("multiscale_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const bool ran = run_fixtures(root / "auto1", "0") && run_fixtures(root / "auto2", "0") &&
                   run_fixtures(root / "single", "1");
  o.check(ran, "all fixtures exit 0");
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(root / "auto1")) {
    if (e.path().filename() == "errors.txt") continue;
    ++files;
    const auto ref = slurp(e.path());
    for (const char* other : {"auto2", "single"})
      if (slurp(root / other / e.path().filename()) != ref) ++differing;
  }
  o.check(files >= 20 && differing == 0,
          std::to_string(files) + " files compared, " + std::to_string(differing) + " mismatches");
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  criterion(1, "Hurst chain consistency", 10.0, hurst_chain);
  criterion(2, "White-noise calibration", 60.0, white_noise);
  criterion(3, "Multifractal cascade oracle", 30.0, cascade);
  criterion(4, "Heisenberg asymptotes", 5.0, heisenberg);
  criterion(5, "CWT correctness", 10.0, cwt);
  criterion(6, "DWT reconstruction and trend annihilation", 5.0, dwt_checks);
  criterion(7, "Phase offset, locking and invariants", 10.0, phase);
  criterion(8, "End-to-end CLI determinism", 60.0, cli_determinism);
  std::printf("acceptance: %d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
