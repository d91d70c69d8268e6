#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "nsvda/errors.hpp"
#include "nsvda/io.hpp"
#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"

using namespace nsvda;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nsvda_tests";
  fs::create_directories(dir);
  return dir / name;
}

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for: " << text;
  return ConfigError("", 0, "");
}

}  // namespace

TEST(Config, DefaultFileMatchesDefaults) {
  const TwinConfig c = load_config(fs::path(NSVDA_SOURCE_DIR) / "configs" / "default.cfg");
  EXPECT_EQ(emit_config(c), emit_config(TwinConfig{}));
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& e : fs::directory_iterator(fs::path(NSVDA_SOURCE_DIR) / "configs")) {
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
  }
}

TEST(Config, EmitParseRoundTrip) {
  TwinConfig c;
  c.grid = GridSpec(64);
  c.nu = 0.1 / 3.0;
  c.alpha = 1e-3;
  c.interpolant = InterpolantOp(InterpolantKind::volume_average, 0.0625);
  c.stepper.scheme = Scheme::imex_cnab2;
  c.stepper.observation = ObservationTiming::step_start;
  c.mu = 400.0;
  c.spinup_time = 1.5;
  c.v_init = VInit::independent;
  c.forcing.kind = ForcingSpec::Kind::none;
  c.init.kind = InitSpec::Kind::taylor_green;
  c.seed = 123456789012345ull;
  const std::string text = emit_config(c);
  EXPECT_EQ(emit_config(parse_config(text)), text);
  EXPECT_EQ(parse_config(text).nu, c.nu);
}

TEST(Config, CommentsAndPartialFiles) {
  const TwinConfig c = parse_config("# header\n\nphysics.nu = 0.1  # trailing\n  grid.n=32\n");
  EXPECT_EQ(c.nu, 0.1);
  EXPECT_EQ(c.grid.n(), 32);
  EXPECT_EQ(c.alpha, TwinConfig{}.alpha);
}

TEST(Config, ErrorsNameKeyAndLine) {
  ConfigError e = parse_error("grid.n = 32\nphysics.nuu = 1\n");
  EXPECT_EQ(e.key(), "physics.nuu");
  EXPECT_EQ(e.line(), 2);
  e = parse_error("physics.nu = abc\n");
  EXPECT_EQ(e.key(), "physics.nu");
  e = parse_error("physics.nu = 0.1\nphysics.nu = 0.2\n");
  EXPECT_EQ(e.line(), 2);
  e = parse_error("\n\nphysics.nu = -1\n");
  EXPECT_EQ(e.key(), "physics.nu");
  EXPECT_EQ(e.line(), 3);
  e = parse_error("stepper.scheme = euler\n");
  EXPECT_EQ(e.key(), "stepper.scheme");
  e = parse_error("just some words\n");
  EXPECT_EQ(e.line(), 1);
  e = parse_error("grid.n = 33\n");
  EXPECT_EQ(e.key(), "grid.n");
}

TEST(Config, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, 50.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(50.0), "50");
}

TEST(Checkpoint, RoundTripIsBitIdentical) {
  const GridSpec g(16);
  Rng rng(1);
  const VelocityField a = random_solenoidal(g, rng, power_law_spectrum(-3.0), 1.0);
  const VelocityField b = random_solenoidal(g, rng, power_law_spectrum(-1.0), 2.0);
  const fs::path path = temp_path("round.chk");
  write_checkpoint(path, std::vector<VelocityField>{a, b});
  EXPECT_EQ(fs::file_size(path), 16u + 4u * 16 * 9 * 16);
  const auto back = read_checkpoint(path);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < g.modes(); ++i) {
    EXPECT_EQ(back[0].x.coeffs()[i], a.x.coeffs()[i]);
    EXPECT_EQ(back[1].y.coeffs()[i], b.y.coeffs()[i]);
  }
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const GridSpec g(16);
  const fs::path path = temp_path("bad.chk");
  write_checkpoint(path, std::vector<VelocityField>{VelocityField(g)});
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
  }
  EXPECT_THROW(read_checkpoint(path), FormatError);

  write_checkpoint(path, std::vector<VelocityField>{VelocityField(g)});
  fs::resize_file(path, fs::file_size(path) - 8);
  EXPECT_THROW(read_checkpoint(path), FormatError);

  write_checkpoint(path, std::vector<VelocityField>{VelocityField(g)});
  std::ofstream(path, std::ios::app | std::ios::binary).put('\0');
  EXPECT_THROW(read_checkpoint(path), FormatError);
  EXPECT_THROW(read_checkpoint(temp_path("missing.chk")), FormatError);
}

TEST(Manifest, ListsArtifactsAndEcho) {
  RunManifest m;
  m.config_echo = emit_config(TwinConfig{});
  m.seed = 7;
  m.started = utc_timestamp();
  m.finished = m.started;
  m.artifacts = {"twin.csv", "manifest.json"};
  const fs::path path = temp_path("manifest.json");
  write_manifest(path, m);
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["artifacts"].size(), 2u);
  EXPECT_EQ(emit_config(parse_config(j["config_echo"].get<std::string>())), m.config_echo);
  EXPECT_EQ(j["code_version"], version());
}
