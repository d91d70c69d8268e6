#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsvda/diagnostics.hpp"
#include "nsvda/experiment.hpp"

namespace nsvda {

const char* version();

/// Flat `key = value` configuration, one setting per line, `#` starts a
/// comment. Omitted keys keep the TwinConfig defaults. Unknown or repeated
/// keys, malformed values and violated invariants throw ConfigError naming
/// the key and line. The grammar and key list are in docs/formats.md.
TwinConfig parse_config(std::string_view text);
TwinConfig load_config(const std::filesystem::path& path);

/// Every key, in a fixed order, with shortest round-trip number formatting;
/// parse_config(emit_config(c)) reproduces c.
std::string emit_config(const TwinConfig& cfg);

/// Binary checkpoint: "VNDG", u32 version, u32 n, u32 field count, then per
/// scalar field n*(n/2+1) (re, im) pairs of little-endian IEEE binary64 in
/// row-major half-spectrum order. Each velocity field is two scalar fields
/// (x then y).
void write_checkpoint(const std::filesystem::path& path, std::span<const VelocityField> fields);

/// Throws FormatError on bad magic, unsupported version, odd field count or
/// a length that does not match the header.
std::vector<VelocityField> read_checkpoint(const std::filesystem::path& path,
                                           double dealias_fraction = 2.0 / 3.0);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct RunManifest {
  std::string config_echo;
  std::string code_version = version();
  std::uint64_t seed = 0;
  std::string started;   ///< UTC, ISO 8601
  std::string finished;
  std::vector<std::string> artifacts;  ///< paths relative to the run directory
};

std::string utc_timestamp();
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

/// t,l2_err,h1_err,h2_err,X,Xtilde,energy_u,energy_v at 17 significant digits.
void write_record_csv(const std::filesystem::path& path, const TwinRunRecord& rec);

/// Config echo, Grashof number, condition report and (when given) fit, as JSON.
void write_record_metadata(const std::filesystem::path& path, const TwinRunRecord& rec,
                           const DecayFit* fit);

/// alpha,plateau_l2,plateau_h1,plateau_h2,rate,t_knee,floor_limited,status
/// (the floor run, if any, is the row with alpha = 0).
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);
/// quantity,slope for plateau_l2, plateau_h1, plateau_h2.
void write_slopes_csv(const std::filesystem::path& path, const SweepResult& sweep);

/// t,energy,enstrophy,injection,dissipation,residual.
void write_balance_csv(const std::filesystem::path& path, const std::vector<BalanceSample>& b);
/// shell,energy.
void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumBin>& s);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace nsvda
