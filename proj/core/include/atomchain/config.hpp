#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "atomchain/protocols.hpp"

namespace atomchain {

std::string_view version() noexcept;

struct ParsedConfig {
  ProtocolConfig config;
  std::vector<std::string> warnings;
};

/// Flat `key = value` text with dotted keys and `#` comments. Reals accept a
/// `pi` factor and one division: `0.5pi`, `pi/2`, `1/6`. The schedule is a
/// `;`-separated list of hold(theta, T), cosine_ramp(from, to, T) and
/// oscillate(center, amplitude, period, cycles). Defaults come from
/// default_config(scenario).
/// Throws ParseError (with line and column) or ValidationError (naming the field).
ParsedConfig parse_config_text(std::string_view text);
ParsedConfig parse_config(const std::filesystem::path& path);

/// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ProtocolConfig& config);

/// FNV-1a 64 of the canonical text, so formatting and key order do not matter.
std::uint64_t config_hash(const ProtocolConfig& config);
std::string hash_hex(std::uint64_t hash);

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string tool_version;
  double runtime_seconds = 0.0;
  std::vector<std::filesystem::path> outputs;
};

void write_manifest(std::ostream& out, const RunManifest& manifest);

}  // namespace atomchain
