#include "nsvda/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#ifndef NSVDA_VERSION
#define NSVDA_VERSION "unknown"
#endif

namespace nsvda {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

const char* version() { return NSVDA_VERSION; }

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Values as written in the file, before the objects that validate them exist.
struct Raw {
  int n = 128;
  double dealias = 2.0 / 3.0;
  InterpolantKind interp_kind = InterpolantKind::fourier_truncation;
  double h = 0.125;
};

struct Parser {
  TwinConfig& cfg;
  Raw& raw;
  std::string key;
  std::string value;
  int line;

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(key, line, message); }

  double number() const {
    double x = 0.0;
    const char* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end) fail("expected a number, got '" + value + "'");
    if (!std::isfinite(x)) fail("must be finite");
    return x;
  }

  std::uint64_t unsigned_integer() const {
    std::uint64_t x = 0;
    const char* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end) {
      fail("expected a non-negative integer, got '" + value + "'");
    }
    return x;
  }

  int integer() const {
    int x = 0;
    const char* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end) fail("expected an integer, got '" + value + "'");
    return x;
  }

  template <class T>
  T choice(std::optional<T> parsed, const char* allowed) const {
    if (!parsed) fail("expected one of " + std::string(allowed) + ", got '" + value + "'");
    return *parsed;
  }
};

using Setter = std::function<void(Parser&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.n", [](Parser& p) { p.raw.n = p.integer(); }},
      {"grid.dealias", [](Parser& p) { p.raw.dealias = p.number(); }},
      {"physics.nu", [](Parser& p) { p.cfg.nu = p.number(); }},
      {"physics.alpha", [](Parser& p) { p.cfg.alpha = p.number(); }},
      {"physics.mu", [](Parser& p) { p.cfg.mu = p.number(); }},
      {"forcing.kind",
       [](Parser& p) {
         if (p.value == "band") {
           p.cfg.forcing.kind = ForcingSpec::Kind::band;
         } else if (p.value == "none") {
           p.cfg.forcing.kind = ForcingSpec::Kind::none;
         } else {
           p.fail("expected one of band, none, got '" + p.value + "'");
         }
       }},
      {"forcing.grashof", [](Parser& p) { p.cfg.forcing.grashof = p.number(); }},
      {"forcing.kmin", [](Parser& p) { p.cfg.forcing.kmin = p.number(); }},
      {"forcing.kmax", [](Parser& p) { p.cfg.forcing.kmax = p.number(); }},
      {"interpolant.kind",
       [](Parser& p) {
         p.raw.interp_kind = p.choice(interpolant_kind_from_string(p.value),
                                      "fourier_truncation, nodal_bilinear, volume_average");
       }},
      {"interpolant.h", [](Parser& p) { p.raw.h = p.number(); }},
      {"stepper.dt", [](Parser& p) { p.cfg.stepper.dt = p.number(); }},
      {"stepper.scheme",
       [](Parser& p) {
         p.cfg.stepper.scheme =
             p.choice(scheme_from_string(p.value), "if_rk4, imex_cnab2, etdrk4");
       }},
      {"stepper.t_end", [](Parser& p) { p.cfg.stepper.t_end = p.number(); }},
      {"stepper.cfl_limit", [](Parser& p) { p.cfg.stepper.cfl_limit = p.number(); }},
      {"stepper.observation",
       [](Parser& p) {
         p.cfg.stepper.observation =
             p.choice(observation_timing_from_string(p.value), "stage, step_start");
       }},
      {"init.kind",
       [](Parser& p) {
         if (p.value == "random") {
           p.cfg.init.kind = InitSpec::Kind::random;
         } else if (p.value == "taylor_green") {
           p.cfg.init.kind = InitSpec::Kind::taylor_green;
         } else if (p.value == "zero") {
           p.cfg.init.kind = InitSpec::Kind::zero;
         } else {
           p.fail("expected one of random, taylor_green, zero, got '" + p.value + "'");
         }
       }},
      {"init.amplitude", [](Parser& p) { p.cfg.init.amplitude = p.number(); }},
      {"twin.spinup_time",
       [](Parser& p) {
         if (p.value == "auto") {
           p.cfg.spinup_time.reset();
         } else {
           p.cfg.spinup_time = p.number();
         }
       }},
      {"twin.v_init",
       [](Parser& p) {
         p.cfg.v_init = p.choice(v_init_from_string(p.value), "zero, perturbed, independent");
       }},
      {"twin.v_epsilon", [](Parser& p) { p.cfg.v_epsilon = p.number(); }},
      {"twin.sample_interval", [](Parser& p) { p.cfg.sample_interval = p.number(); }},
      {"twin.c_assumed", [](Parser& p) { p.cfg.c_assumed = p.number(); }},
      {"twin.decay_window", [](Parser& p) { p.cfg.fit.decay_window = p.number(); }},
      {"twin.plateau_window", [](Parser& p) { p.cfg.fit.plateau_window = p.number(); }},
      {"twin.plateau_tolerance", [](Parser& p) { p.cfg.fit.plateau_tolerance = p.number(); }},
      {"run.seed", [](Parser& p) { p.cfg.seed = p.unsigned_integer(); }},
  };
  return table;
}

std::string forcing_kind_name(ForcingSpec::Kind k) {
  return k == ForcingSpec::Kind::band ? "band" : "none";
}

std::string init_kind_name(InitSpec::Kind k) {
  switch (k) {
    case InitSpec::Kind::random: return "random";
    case InitSpec::Kind::taylor_green: return "taylor_green";
    case InitSpec::Kind::zero: return "zero";
  }
  return "?";
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

TwinConfig parse_config(std::string_view text) {
  TwinConfig cfg;
  Raw raw;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(std::string_view(line).substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("", line_no, "expected 'key = value'");
    Parser p{cfg, raw, trim(std::string_view(content).substr(0, eq)),
             trim(std::string_view(content).substr(eq + 1)), line_no};
    if (p.key.empty()) throw ConfigError("", line_no, "missing key");
    const auto it = setters().find(p.key);
    if (it == setters().end()) p.fail("unknown key");
    if (seen.count(p.key)) {
      p.fail("repeated key (first set on line " + std::to_string(seen[p.key]) + ")");
    }
    if (p.value.empty()) p.fail("missing value");
    seen[p.key] = line_no;
    it->second(p);
  }

  auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  auto build = [&](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const ParameterError& e) {
      const std::string k = e.key().empty() ? key : e.key();
      const std::string prefix = k + ": ";
      std::string msg = e.what();
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      throw ConfigError(k, line_of(k), msg);
    }
  };
  build(line_of("grid.dealias") > 0 && line_of("grid.n") == 0 ? "grid.dealias" : "grid.n",
        [&] { cfg.grid = GridSpec(raw.n, raw.dealias); });
  build("interpolant.h", [&] { cfg.interpolant = InterpolantOp(raw.interp_kind, raw.h); });
  build("", [&] { cfg.validate(); });
  return cfg;
}

TwinConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string emit_config(const TwinConfig& c) {
  std::ostringstream o;
  auto kv = [&](const char* key, const std::string& value) { o << key << " = " << value << '\n'; };
  auto num = [&](const char* key, double x) { kv(key, format_double(x)); };
  kv("grid.n", std::to_string(c.grid.n()));
  num("grid.dealias", c.grid.dealias_fraction());
  num("physics.nu", c.nu);
  num("physics.alpha", c.alpha);
  num("physics.mu", c.mu);
  kv("forcing.kind", forcing_kind_name(c.forcing.kind));
  num("forcing.grashof", c.forcing.grashof);
  num("forcing.kmin", c.forcing.kmin);
  num("forcing.kmax", c.forcing.kmax);
  kv("interpolant.kind", to_string(c.interpolant.kind()));
  num("interpolant.h", c.interpolant.h());
  num("stepper.dt", c.stepper.dt);
  kv("stepper.scheme", to_string(c.stepper.scheme));
  num("stepper.t_end", c.stepper.t_end);
  num("stepper.cfl_limit", c.stepper.cfl_limit);
  kv("stepper.observation", to_string(c.stepper.observation));
  kv("init.kind", init_kind_name(c.init.kind));
  num("init.amplitude", c.init.amplitude);
  kv("twin.spinup_time", c.spinup_time ? format_double(*c.spinup_time) : "auto");
  kv("twin.v_init", to_string(c.v_init));
  num("twin.v_epsilon", c.v_epsilon);
  num("twin.sample_interval", c.sample_interval);
  num("twin.c_assumed", c.c_assumed);
  num("twin.decay_window", c.fit.decay_window);
  num("twin.plateau_window", c.fit.plateau_window);
  num("twin.plateau_tolerance", c.fit.plateau_tolerance);
  kv("run.seed", std::to_string(c.seed));
  return o.str();
}

void write_checkpoint(const std::filesystem::path& path, std::span<const VelocityField> fields) {
  if (fields.empty()) throw StructuralError("write_checkpoint: no fields");
  const GridSpec& g = fields.front().grid();
  for (const auto& f : fields) require_same_grid(f.grid(), g, "write_checkpoint");

  auto out = open_out(path, true);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  out.write("VNDG", 4);
  u32(kCheckpointVersion);
  u32(static_cast<std::uint32_t>(g.n()));
  u32(static_cast<std::uint32_t>(2 * fields.size()));
  for (const auto& f : fields) {
    for (const SpectralField* s : {&f.x, &f.y}) {
      // std::complex<double> is laid out as (re, im).
      const auto bytes = std::as_bytes(s->coeffs());
      out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
    }
  }
  if (!out) throw Error("write_checkpoint: write failed for " + path.string());
}

std::vector<VelocityField> read_checkpoint(const std::filesystem::path& path,
                                           double dealias_fraction) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("read_checkpoint: cannot open " + path.string());
  char magic[4] = {};
  std::uint32_t header[3] = {};
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in) throw FormatError("read_checkpoint: truncated header");
  if (std::memcmp(magic, "VNDG", 4) != 0) throw FormatError("read_checkpoint: bad magic");
  if (header[0] != kCheckpointVersion) {
    throw FormatError("read_checkpoint: unsupported version " + std::to_string(header[0]));
  }
  const auto n = static_cast<int>(header[1]);
  const std::uint32_t count = header[2];
  if (count == 0 || count % 2 != 0) {
    throw FormatError("read_checkpoint: field count must be a positive even number");
  }
  GridSpec g;
  try {
    g = GridSpec(n, dealias_fraction);
  } catch (const ParameterError& e) {
    throw FormatError(std::string("read_checkpoint: bad resolution: ") + e.what());
  }
  std::vector<VelocityField> fields;
  for (std::uint32_t i = 0; i < count / 2; ++i) {
    VelocityField v(g);
    for (SpectralField* s : {&v.x, &v.y}) {
      const auto bytes = std::as_writable_bytes(s->coeffs());
      in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      if (!in) throw FormatError("read_checkpoint: truncated data");
    }
    fields.push_back(std::move(v));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("read_checkpoint: trailing bytes after the last field");
  }
  return fields;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json j;
  j["config_echo"] = m.config_echo;
  j["code_version"] = m.code_version;
  j["seed"] = m.seed;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["artifacts"] = m.artifacts;
  open_out(path) << j.dump(2) << '\n';
}

void write_record_csv(const std::filesystem::path& path, const TwinRunRecord& r) {
  auto out = open_out(path);
  out << "t,l2_err,h1_err,h2_err,X,Xtilde,energy_u,energy_v\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    out << csv_number(r.times[i]) << ',' << csv_number(r.l2_err[i]) << ','
        << csv_number(r.h1_err[i]) << ',' << csv_number(r.h2_err[i]) << ','
        << csv_number(r.x_t[i]) << ',' << csv_number(r.x_tilde_t[i]) << ','
        << csv_number(r.energy_u[i]) << ',' << csv_number(r.energy_v[i]) << '\n';
  }
}

void write_record_metadata(const std::filesystem::path& path, const TwinRunRecord& r,
                           const DecayFit* fit) {
  const ConditionReport& c = r.conditions;
  nlohmann::json j;
  j["config"] = emit_config(r.config);
  j["spinup_time"] = r.spinup_time;
  j["samples"] = r.size();
  j["grashof"] = {{"g", r.grashof.g}, {"f_l2", r.grashof.f_l2}, {"lambda1", r.grashof.lambda1}};
  j["conditions"] = {{"g", c.g},
                     {"c1", c.c1},
                     {"h", c.h},
                     {"h_max", number_or_null(c.h_max)},
                     {"h_unconstrained", c.h_unconstrained},
                     {"m1", c.m1},
                     {"m2", c.m2},
                     {"alpha", c.alpha},
                     {"alpha_max_t2", number_or_null(c.alpha_max_t2)},
                     {"alpha_max_t3", number_or_null(c.alpha_max_t3)},
                     {"c_assumed", c.c_assumed},
                     {"satisfied_t2", c.satisfied_t2},
                     {"satisfied_t3", c.satisfied_t3}};
  if (fit != nullptr) {
    j["fit"] = {{"rate", fit->rate},
                {"plateau_x", fit->plateau_x},
                {"plateau_l2", fit->plateau_l2},
                {"plateau_h1", fit->plateau_h1},
                {"plateau_h2", fit->plateau_h2},
                {"t_knee", fit->t_knee}};
  }
  open_out(path) << j.dump(2) << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& s) {
  auto out = open_out(path);
  out << "alpha,plateau_l2,plateau_h1,plateau_h2,rate,t_knee,floor_limited,status\n";
  auto row = [&](const SweepRow& r) {
    out << csv_number(r.alpha) << ',' << csv_number(r.fit.plateau_l2) << ','
        << csv_number(r.fit.plateau_h1) << ',' << csv_number(r.fit.plateau_h2) << ','
        << csv_number(r.fit.rate) << ',' << csv_number(r.fit.t_knee) << ','
        << (r.floor_limited ? 1 : 0) << ',' << (r.ok ? "ok" : "failed") << '\n';
  };
  for (const auto& r : s.rows) row(r);
  if (s.floor) row(*s.floor);
}

void write_slopes_csv(const std::filesystem::path& path, const SweepResult& s) {
  auto out = open_out(path);
  out << "quantity,slope\n";
  out << "plateau_l2," << csv_number(s.slope_l2) << '\n';
  out << "plateau_h1," << csv_number(s.slope_h1) << '\n';
  out << "plateau_h2," << csv_number(s.slope_h2) << '\n';
}

void write_balance_csv(const std::filesystem::path& path, const std::vector<BalanceSample>& b) {
  auto out = open_out(path);
  out << "t,energy,enstrophy,injection,dissipation,residual\n";
  for (const auto& s : b) {
    out << csv_number(s.t) << ',' << csv_number(s.energy) << ',' << csv_number(s.enstrophy) << ','
        << csv_number(s.injection) << ',' << csv_number(s.dissipation) << ','
        << csv_number(s.residual) << '\n';
  }
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumBin>& s) {
  auto out = open_out(path);
  out << "shell,energy\n";
  for (const auto& b : s) out << b.shell << ',' << csv_number(b.energy) << '\n';
}

}  // namespace nsvda
