#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "multiscale/multiscale.hpp"
#include "params.hpp"

namespace fs = std::filesystem;
namespace ms = multiscale;
using nlohmann::json;

namespace cli {
namespace {

struct OptionSpec {
  std::string section;  // "" for global keys
  std::string name;
  std::string help;
  bool is_flag = false;
};

const std::vector<OptionSpec>& option_table() {
  static const std::vector<OptionSpec> table = {
      {"", "dt", "sample spacing in seconds (single-column input)"},
      {"", "out", "output directory"},
      {"", "format", "csv, json or both"},
      {"gen", "n", "number of samples"},
      {"gen", "seed", "random seed"},
      {"gen", "h", "Hurst exponent for fgn"},
      {"gen", "p", "cascade weight"},
      {"gen", "levels", "cascade levels"},
      {"gen", "shuffle", "shuffle cascade cells", true},
      {"gen", "f", "sine frequency in Hz (comma list for sum-of-sines)"},
      {"gen", "amp", "sine amplitude(s)"},
      {"gen", "phase", "sine phase(s) in radians"},
      {"gen", "output", "output file (default <out>/<kind>.csv)"},
      {"lowpass", "cutoff", "cutoff frequency in Hz"},
      {"embed", "dim", "embedding dimension, 2 or 3"},
      {"embed", "lag", "lag in samples (default: quarter dominant period)"},
      {"spectrum", "segments", "Welch segments"},
      {"spectrum", "overlap", "Welch overlap fraction"},
      {"powerlaw", "fmin", "lower fit frequency"},
      {"powerlaw", "fmax", "upper fit frequency"},
      {"powerlaw", "segments", "Welch segments"},
      {"powerlaw", "overlap", "Welch overlap fraction"},
      {"powerlaw", "profile", "fit the spectrum of the cumulative profile", true},
      {"heisenberg", "fmin", "lower fit frequency"},
      {"heisenberg", "fmax", "upper fit frequency"},
      {"heisenberg", "segments", "Welch segments"},
      {"heisenberg", "overlap", "Welch overlap fraction"},
      {"rs", "windows", "window sizes: lo..hi (dyadic) or a comma list"},
      {"mfdfa", "scales", "segment sizes: lo..hi (dyadic) or a comma list"},
      {"mfdfa", "q", "moments: lo..hi (zero skipped) or a comma list"},
      {"mfdfa", "detrend", "poly or wavelet"},
      {"mfdfa", "order", "polynomial order or Daubechies order"},
      {"mfdfa", "level", "wavelet trend level (0 = per scale)"},
      {"cwt", "s0", "smallest scale in seconds, or e.g. 2dt"},
      {"cwt", "dj", "scale step in octaves"},
      {"cwt", "smax", "largest scale in seconds (default N dt / 4)"},
      {"cwt", "omega0", "Morlet center frequency"},
      {"cwt", "sig", "significance level (0 disables)"},
      {"cwt", "padding", "zero or periodic"},
      {"phase", "scale", "analysis scale in seconds, or e.g. 64dt"},
      {"phase", "ref", "second series for phase difference and locking"},
      {"phase", "tol", "locking tolerance in radians"},
      {"phase", "min-duration", "shortest locking run in samples (default: one dominant period)"},
      {"phase", "omega0", "Morlet center frequency"},
      {"phase", "padding", "zero or periodic"},
      {"pipeline", "steps", "comma list of analyses"},
  };
  return table;
}

std::string key_of(const OptionSpec& o) { return o.section.empty() ? o.name : o.section + "." + o.name; }

std::set<std::string> known_keys() {
  std::set<std::string> keys = {"input", "gen.kind"};
  for (const auto& o : option_table()) keys.insert(key_of(o));
  return keys;
}

int exit_code(Errc c) {
  switch (c) {
    case Errc::Malformed:
    case Errc::NonUniformSampling:
    case Errc::TooShort:
    case Errc::Io:
      return 3;
    case Errc::EmbeddingFailure:
    case Errc::ZeroPower:
    case Errc::DegenerateWindow:
    case Errc::NonPositiveVariance:
    case Errc::EmptyCOI:
      return 4;
    default:
      return 2;
  }
}

void report(const std::string& code, const std::string& operation, const std::string& detail) {
  std::cerr << json{{"code", code}, {"operation", operation}, {"detail", detail}}.dump() << '\n';
}

// ---------------------------------------------------------------- output

class Output {
 public:
  Output(const Params& p, std::string stem) : dir_(p.str("out", ".")), stem_(std::move(stem)) {
    const auto fmt = p.str("format", "both");
    require(fmt == "csv" || fmt == "json" || fmt == "both", Errc::InvalidArgument, "format must be csv, json or both");
    csv_ = fmt != "json";
    json_ = fmt != "csv";
  }

  void csv(const std::string& analysis, const std::function<void(std::ostream&)>& body) {
    if (csv_) write(analysis + ".csv", body);
  }

  void json_doc(const std::string& analysis, const json& doc) {
    if (json_) write(analysis + ".json", [&](std::ostream& o) { o << doc.dump(1) << '\n'; });
  }

  json written() const { return written_; }
  void clear() { written_ = json::array(); }

 private:
  void write(const std::string& suffix, const std::function<void(std::ostream&)>& body) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    const auto path = dir_ / (stem_ + "." + suffix);
    std::ofstream f(path, std::ios::binary);
    require(f.good(), Errc::Io, "cannot write '" + path.string() + "'");
    body(f);
    f.flush();
    require(f.good(), Errc::Io, "write failed for '" + path.string() + "'");
    written_.push_back(path.string());
  }

  fs::path dir_;
  std::string stem_;
  bool csv_ = true;
  bool json_ = true;
  json written_ = json::array();
};

// ---------------------------------------------------------------- input

std::string input_path(const Params& p) {
  const auto path = p.str("input");
  require(!path.empty(), Errc::InvalidArgument, "no input file given");
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ms::TimeSeries load_series(const std::string& path, const Params& p) {
  const auto text = read_file(path);
  if (fs::path(path).extension() == ".json") {
    const auto j = json::parse(text, nullptr, false);
    require(!j.is_discarded(), Errc::Malformed, "'" + path + "' is not valid JSON");
    return ms::time_series_from_json(j);
  }
  std::istringstream in(text);
  return ms::load_csv(in, ms::CsvLayout{ms::CsvLayout::Kind::Auto, p.num("dt", 1.0)});
}

bool looks_like_spectrum(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto body = ms::detail::trim(line);
    if (body.starts_with("\xEF\xBB\xBF")) body.remove_prefix(3);
    if (body.empty() || body.front() == '#') continue;
    return body.starts_with("freq");
  }
  return false;
}

/// Shared input for one run: the series, or a spectrum CSV for the fits.
struct Input {
  std::string path;
  std::string text;
  bool is_spectrum = false;
  std::optional<ms::TimeSeries> series;

  static Input open(const Params& p) {
    Input in;
    in.path = input_path(p);
    in.text = read_file(in.path);
    in.is_spectrum = fs::path(in.path).extension() != ".json" && looks_like_spectrum(in.text);
    return in;
  }

  const ms::TimeSeries& ts(const Params& p, const std::string& op) {
    require(!is_spectrum, Errc::Malformed, op + " needs a time series, got a spectrum CSV");
    if (!series) series = load_series(path, p);
    return *series;
  }

  std::string stem() const { return fs::path(path).stem().string(); }
};

// ---------------------------------------------------------------- analyses

ms::PowerSpectrum spectrum_for(Input& in, const Params& p, const std::string& section, bool use_profile) {
  if (in.is_spectrum) {
    std::istringstream s(in.text);
    return ms::load_spectrum_csv(s);
  }
  const auto& ts = in.ts(p, section);
  const auto segments = p.count(section + ".segments", 1);
  const double overlap = p.num(section + ".overlap", 0.5);
  return ms::periodogram(use_profile ? ms::profile(ts) : ts, segments, overlap);
}

json run_profile(Input& in, const Params& p, Output& out) {
  const auto y = ms::profile(in.ts(p, "profile"));
  out.csv("profile", [&](std::ostream& o) { ms::write_csv(o, y); });
  out.json_doc("profile", ms::to_json(y));
  return {{"n", y.size()}};
}

json run_lowpass(Input& in, const Params& p, Output& out) {
  require(p.has("lowpass.cutoff"), Errc::InvalidArgument, "lowpass needs --cutoff");
  const auto y = ms::lowpass(in.ts(p, "lowpass"), p.num("lowpass.cutoff", 0.0));
  out.csv("lowpass", [&](std::ostream& o) { ms::write_csv(o, y); });
  out.json_doc("lowpass", ms::to_json(y));
  return {{"n", y.size()}, {"cutoff", p.num("lowpass.cutoff", 0.0)}};
}

json run_embed(Input& in, const Params& p, Output& out) {
  const auto& ts = in.ts(p, "embed");
  const auto dim = p.count("embed.dim", 2);
  require(dim == 2 || dim == 3, Errc::InvalidArgument, "embedding dimension must be 2 or 3");
  const auto lag = p.has("embed.lag") ? p.count("embed.lag", 1) : ms::default_embedding_lag(ts);
  std::vector<std::vector<double>> points;
  if (dim == 2) {
    for (const auto& pt : ms::delay_embed<2>(ts, lag)) points.push_back({pt[0], pt[1]});
  } else {
    for (const auto& pt : ms::delay_embed<3>(ts, lag)) points.push_back({pt[0], pt[1], pt[2]});
  }
  out.csv("embed", [&](std::ostream& o) {
    o << (dim == 2 ? "x0,x1\n" : "x0,x1,x2\n");
    for (const auto& pt : points) {
      for (std::size_t d = 0; d < pt.size(); ++d) o << (d ? "," : "") << ms::format_double(pt[d]);
      o << '\n';
    }
  });
  out.json_doc("embed", {{"dim", dim}, {"lag", lag}, {"points", points}});
  return {{"dim", dim}, {"lag", lag}, {"points", points.size()}};
}

json run_spectrum(Input& in, const Params& p, Output& out) {
  const auto spec = spectrum_for(in, p, "spectrum", false);
  out.csv("spectrum", [&](std::ostream& o) { ms::write_csv(o, spec); });
  out.json_doc("spectrum", ms::to_json(spec));
  return {{"bins", spec.size()}, {"df", spec.df}, {"dominant_frequency", ms::dominant_frequency(spec)}};
}

json run_powerlaw(Input& in, const Params& p, Output& out) {
  const auto spec = spectrum_for(in, p, "powerlaw", p.flag("powerlaw.profile"));
  const auto band = ms::default_fit_band(spec);
  const auto fit = ms::fit_power_law(spec, p.num("powerlaw.fmin", band.lo), p.num("powerlaw.fmax", band.hi));
  out.csv("powerlaw", [&](std::ostream& o) {
    o << "freq,power,fit\n";
    for (std::size_t i = 0; i < spec.size(); ++i)
      o << ms::format_double(spec.freqs[i]) << ',' << ms::format_double(spec.power[i]) << ','
        << ms::format_double(std::pow(10.0, fit.intercept) * std::pow(spec.freqs[i], -fit.alpha)) << '\n';
  });
  out.json_doc("powerlaw", ms::to_json(fit));
  const auto h = ms::hurst_from_alpha(fit.alpha);
  return {{"alpha", fit.alpha}, {"H", h.hurst}, {"r2", fit.r2}, {"bins", fit.bins}, {"H_out_of_range", h.out_of_range}};
}

json run_heisenberg(Input& in, const Params& p, Output& out) {
  const auto spec = spectrum_for(in, p, "heisenberg", false);
  const auto fit = ms::fit_heisenberg(spec, p.num("heisenberg.fmin", spec.freqs.front()),
                                      p.num("heisenberg.fmax", spec.freqs.back()));
  out.csv("heisenberg", [&](std::ostream& o) {
    o << "freq,power,model\n";
    for (std::size_t i = 0; i < spec.size(); ++i)
      o << ms::format_double(spec.freqs[i]) << ',' << ms::format_double(spec.power[i]) << ','
        << ms::format_double(ms::heisenberg_model(spec.freqs[i], fit.amplitude, fit.k_d)) << '\n';
  });
  out.json_doc("heisenberg", ms::to_json(fit));
  return {{"k_d", fit.k_d},
          {"amplitude", fit.amplitude},
          {"rss", fit.rss},
          {"no_interior_minimum", fit.no_interior_minimum}};
}

json run_rs(Input& in, const Params& p, Output& out) {
  const auto& ts = in.ts(p, "rs");
  const auto windows = p.sizes("rs.windows").value_or(ms::dyadic_sizes(16, std::max<std::size_t>(16, ts.size() / 4)));
  const auto rs = ms::rescaled_range(ts, windows);
  out.csv("rs", [&](std::ostream& o) { ms::write_csv(o, rs); });
  out.json_doc("rs", ms::to_json(rs));
  return {{"H", rs.hurst}, {"stderr", rs.stderr_}};
}

json run_mfdfa(Input& in, const Params& p, Output& out) {
  const auto& ts = in.ts(p, "mfdfa");
  const auto scales = p.sizes("mfdfa.scales").value_or(ms::dyadic_sizes(16, std::max<std::size_t>(16, ts.size() / 4)));
  const auto q = p.q_values("mfdfa.q").value_or(std::vector<double>{-5, -4, -3, -2, -1, 1, 2, 3, 4, 5});
  const auto kind = p.str("mfdfa.detrend", "poly");
  ms::Detrend detrend;
  if (kind == "poly") {
    detrend = ms::PolynomialDetrend{static_cast<int>(p.count("mfdfa.order", 1))};
  } else if (kind == "wavelet") {
    detrend = ms::WaveletDetrend{static_cast<int>(p.count("mfdfa.order", 2)), p.count("mfdfa.level", 0)};
  } else {
    throw Error(Errc::InvalidArgument, "detrend must be poly or wavelet");
  }
  const auto res = ms::mfdfa(ms::profile(ts), scales, q, detrend);
  out.csv("mfdfa", [&](std::ostream& o) { ms::write_csv(o, res); });
  out.json_doc("mfdfa", ms::to_json(res));
  json s;
  const auto two = std::find(res.q_values.begin(), res.q_values.end(), 2.0);
  s["h2"] = two == res.q_values.end() ? json(nullptr) : json(res.hq[std::size_t(two - res.q_values.begin())]);
  s["delta_alpha"] = res.q_values.size() >= 3 ? json(ms::multifractality_width(res)) : json(nullptr);
  return s;
}

json run_cwt(Input& in, const Params& p, Output& out) {
  const auto& ts = in.ts(p, "cwt");
  const double dt = ts.dt();
  const double s0 = p.scale("cwt.s0", 2.0 * dt, dt);
  const double smax = p.scale("cwt.smax", ts.duration() / 4.0, dt);
  const auto grid = ms::ScaleGrid::spanning(s0, p.num("cwt.dj", 0.125), smax);
  const auto pad = p.str("cwt.padding", "zero");
  require(pad == "zero" || pad == "periodic", Errc::InvalidArgument, "padding must be zero or periodic");
  const ms::MorletParams morlet{p.num("cwt.omega0", 6.0)};
  const auto sg =
      ms::cwt_morlet(ts, grid, morlet, pad == "zero" ? ms::CwtPadding::Zero : ms::CwtPadding::Periodic);

  const double level = p.num("cwt.sig", 0.0);
  std::optional<ms::SignificanceMask> mask;
  if (level != 0.0) mask = ms::significance_mask(sg, level);

  const auto g = ms::global_spectrum(sg, false);
  const auto peaks = ms::spectrum_peaks(g);
  std::vector<double> peak_scales;
  for (std::size_t j : peaks) peak_scales.push_back(grid.scale(j));
  const double ff = sg.params().fourier_factor();

  out.csv("cwt", [&](std::ostream& o) { ms::write_scalogram_csv(o, sg, mask ? &*mask : nullptr); });
  std::vector<double> periods;
  for (double s : grid.scales()) periods.push_back(s * ff);
  out.json_doc("cwt", {{"n", sg.n},
                       {"dt", sg.dt},
                       {"omega0", sg.omega0},
                       {"scales", grid.scales()},
                       {"periods", periods},
                       {"global_spectrum", g},
                       {"peak_scales", peak_scales},
                       {"coi", sg.coi},
                       {"significance_level", mask ? json(level) : json(nullptr)},
                       {"significant_cells", mask ? mask->count() : 0}});
  return {{"peak_scale", peak_scales.empty() ? json(nullptr) : json(peak_scales.front())},
          {"peak_period", peak_scales.empty() ? json(nullptr) : json(peak_scales.front() * ff)},
          {"peak_scales", peak_scales},
          {"scales", grid.count},
          {"significant_cells", mask ? json(mask->count()) : json(nullptr)}};
}

json run_phase(Input& in, const Params& p, Output& out) {
  const auto& ts = in.ts(p, "phase");
  require(p.has("phase.scale"), Errc::InvalidArgument, "phase needs --scale");
  const double scale = p.scale("phase.scale", 0.0, ts.dt());
  const auto pad = p.str("phase.padding", "zero");
  require(pad == "zero" || pad == "periodic", Errc::InvalidArgument, "padding must be zero or periodic");
  const ms::MorletParams morlet{p.num("phase.omega0", 6.0)};
  const auto padding = pad == "zero" ? ms::CwtPadding::Zero : ms::CwtPadding::Periodic;
  const auto a = ms::phase_at_scale(ts, scale, morlet, padding);

  if (!p.has("phase.ref")) {
    out.csv("phase", [&](std::ostream& o) { ms::write_csv(o, a); });
    out.json_doc("phase", ms::to_json(a));
    return {{"scale", scale}, {"locking_intervals", nullptr}};
  }
  const auto ref = load_series(p.str("phase.ref"), p);
  require(std::abs(ref.dt() - ts.dt()) <= 1e-9 * ts.dt(), Errc::NonUniformSampling, "reference series has a different dt");
  const auto b = ms::phase_at_scale(ref, scale, morlet, padding);
  std::size_t min_duration = 0;
  if (p.has("phase.min-duration")) {
    min_duration = p.count("phase.min-duration", 0);
  } else {
    const double period = 1.0 / ms::dominant_frequency(ms::periodogram(ts));
    min_duration = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(period / ts.dt())));
  }
  const auto diff = ms::detect_locking(ms::phase_difference(a, b), p.num("phase.tol", 0.5), min_duration);
  out.csv("phase", [&](std::ostream& o) { ms::write_csv(o, diff); });
  out.json_doc("phase", ms::to_json(diff));
  return {{"scale", scale},
          {"min_duration", min_duration},
          {"locking_intervals", diff.locking_intervals.size()},
          {"intervals", ms::to_json(diff.locking_intervals)}};
}

using Runner = json (*)(Input&, const Params&, Output&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"profile", run_profile}, {"lowpass", run_lowpass}, {"embed", run_embed}, {"spectrum", run_spectrum},
      {"powerlaw", run_powerlaw}, {"heisenberg", run_heisenberg}, {"rs", run_rs}, {"mfdfa", run_mfdfa},
      {"cwt", run_cwt}, {"phase", run_phase}};
  return table;
}

json run_analysis(const std::string& name, Input& in, const Params& p, Output& out) {
  out.clear();
  json s = {{"operation", name}};
  s.update(runners().at(name)(in, p, out));
  s["outputs"] = out.written();
  return s;
}

// ---------------------------------------------------------------- gen

ms::TimeSeries generate(const Params& p) {
  const auto kind = p.str("gen.kind");
  const auto n = p.count("gen.n", 4096);
  const double dt = p.num("dt", 1.0);
  require(dt > 0.0, Errc::InvalidArgument, "dt must be > 0");
  const ms::Seed seed{p.count("gen.seed", 0)};
  if (kind == "white") return ms::TimeSeries(ms::gen_white_noise(n, seed).values(), dt);
  if (kind == "fgn") return ms::TimeSeries(ms::gen_fgn(n, p.num("gen.h", 0.5), seed).values(), dt);
  if (kind == "cascade") {
    const auto levels = p.count("gen.levels", 16);
    require(levels <= 24, Errc::InvalidArgument, "cascade levels must lie in [1, 24]");
    const auto c = ms::gen_binomial_cascade(static_cast<unsigned>(levels), p.num("gen.p", 0.6), seed,
                                            p.flag("gen.shuffle"));
    return ms::TimeSeries(c.values(), dt);
  }
  if (kind == "sine" || kind == "sum-of-sines") {
    require(p.has("gen.f"), Errc::InvalidArgument, kind + " needs --f");
    const auto f = p.list("gen.f");
    const auto amp = p.has("gen.amp") ? p.list("gen.amp") : std::vector<double>{1.0};
    const auto phase = p.has("gen.phase") ? p.list("gen.phase") : std::vector<double>{0.0};
    require(!f.empty(), Errc::InvalidArgument, "--f is empty");
    require(kind == "sum-of-sines" || f.size() == 1, Errc::InvalidArgument, "sine takes one frequency");
    auto pick = [&](const std::vector<double>& v, std::size_t i, const char* what) {
      require(v.size() == 1 || v.size() == f.size(), Errc::LengthMismatch,
              std::string(what) + " list must have one entry or one per frequency");
      return v.size() == 1 ? v[0] : v[i];
    };
    std::vector<ms::SineComponent> parts;
    for (std::size_t i = 0; i < f.size(); ++i) parts.push_back({f[i], pick(amp, i, "amp"), pick(phase, i, "phase")});
    return ms::gen_sum_of_sines(n, dt, parts);
  }
  throw Error(Errc::InvalidArgument, "unknown generator '" + kind + "' (white, fgn, cascade, sine, sum-of-sines)");
}

json cmd_gen(const Params& p) {
  require(p.has("gen.kind"), Errc::InvalidArgument, "gen needs a kind");
  const auto ts = generate(p);
  const fs::path path =
      p.has("gen.output") ? fs::path(p.str("gen.output")) : fs::path(p.str("out", ".")) / (p.str("gen.kind") + ".csv");
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  require(f.good(), Errc::Io, "cannot write '" + path.string() + "'");
  ms::write_csv(f, ts);
  f.flush();
  require(f.good(), Errc::Io, "write failed for '" + path.string() + "'");
  return {{"operation", "gen"}, {"kind", p.str("gen.kind")}, {"n", ts.size()}, {"dt", ts.dt()}, {"outputs", {path.string()}}};
}

json cmd_pipeline(const Params& p, std::string& operation) {
  const auto steps = Params::split(p.str("pipeline.steps"));
  require(!steps.empty(), Errc::InvalidArgument, "pipeline.steps is empty");
  for (const auto& s : steps)
    require(runners().count(s) != 0, Errc::InvalidArgument, "unknown pipeline step '" + s + "'");
  auto in = Input::open(p);
  Output out(p, in.stem());
  json summaries = json::array();
  for (const auto& s : steps) {
    operation = "pipeline." + s;
    summaries.push_back(run_analysis(s, in, p, out));
  }
  return {{"operation", "pipeline"}, {"steps", summaries}};
}

// ---------------------------------------------------------------- entry

std::string config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.starts_with("--config=")) return a.substr(9);
  }
  return "";
}

int run(int argc, char** argv) {
  std::string operation = "multiscale";
  try {
    CLI::App app{"Multi-scale fluctuation analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config;
    app.add_option("--config", config, "key=value config file; flags override it");

    std::map<std::string, std::string> raw;
    std::vector<std::pair<std::string, CLI::Option*>> bound;
    std::map<std::string, CLI::App*> subs;
    auto bind = [&](CLI::App* where, const OptionSpec& o) {
      const auto key = key_of(o);
      CLI::Option* opt = o.is_flag ? where->add_flag("--" + o.name, o.help)
                                   : where->add_option("--" + o.name, raw[key], o.help);
      bound.emplace_back(key, opt);
    };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"gen", "generate a synthetic series"},
        {"profile", "cumulative profile"},
        {"lowpass", "zero-phase low-pass filter"},
        {"embed", "delay-coordinate embedding"},
        {"spectrum", "periodogram"},
        {"powerlaw", "log-log power-law fit and Hurst estimate"},
        {"heisenberg", "turbulence spectrum fit"},
        {"rs", "rescaled-range Hurst estimate"},
        {"mfdfa", "multifractal detrended fluctuation analysis"},
        {"cwt", "Morlet wavelet scalogram"},
        {"phase", "wavelet phase and phase locking"},
        {"pipeline", "run pipeline.steps on one input"},
    };
    for (const auto& [name, help] : commands) {
      auto* sub = app.add_subcommand(name, help);
      sub->set_help_flag("--help", "print this help and exit");  // frees -h for gen --h
      subs[name] = sub;
      if (name == "gen") {
        bound.emplace_back("gen.kind", sub->add_option("kind", raw["gen.kind"], "white, fgn, cascade, sine, sum-of-sines"));
      } else {
        bound.emplace_back("input", sub->add_option("input", raw["input"], "input CSV or JSON series"));
      }
    }
    for (const auto& o : option_table()) bind(o.section.empty() ? &app : subs.at(o.section), o);

    const auto cfg = config_path(argc, argv);
    Params params = cfg.empty() ? Params{} : read_config(cfg, known_keys());

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      report("InvalidArgument", operation, e.what());
      return 2;
    }

    for (const auto& [key, opt] : bound)
      if (opt->count() > 0) params.set(key, opt->get_expected_min() == 0 ? "true" : raw[key]);

    const auto* chosen = app.get_subcommands().front();
    operation = chosen->get_name();
    json summary;
    if (operation == "gen") {
      summary = cmd_gen(params);
    } else if (operation == "pipeline") {
      summary = cmd_pipeline(params, operation);
    } else {
      auto in = Input::open(params);
      Output out(params, in.stem());
      summary = run_analysis(operation, in, params, out);
    }
    std::cout << summary.dump() << '\n';
    return 0;
  } catch (const Error& e) {
    report(std::string(ms::errc_name(e.code())), operation, e.detail());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    report("Internal", operation, e.what());
    return 4;
  }
}

}  // namespace
}  // namespace cli

int main(int argc, char** argv) { return cli::run(argc, argv); }
