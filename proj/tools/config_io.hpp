#pragma once

#include <cstdint>
#include <string>

#include "amdi/model.hpp"

namespace amdi::tools {

// YAML with sections source/channel/timing/security; top-level n_users,
// click_filtering, extended_z_sets, quad_points. Missing keys keep the values of
// `base`; unknown keys and type errors throw ConfigError.
ProtocolConfig load_config(const std::string& path, const ProtocolConfig& base);
ProtocolConfig parse_config(const std::string& yaml_text, const ProtocolConfig& base);

// canonical text form, round-trip decimal, fixed key order
std::string dump_config(const ProtocolConfig& cfg);

struct RunManifest {
  std::string command;     // subcommand plus normalized arguments that change output
  std::string config;      // dump_config snapshot
  std::uint64_t seed = 1;
  std::string mode;
  std::string timestamp;   // not hashed
  std::string hash() const;  // SHA-1 hex of command, config, seed and mode
  std::string to_json() const;
};

std::string utc_timestamp();

}  // namespace amdi::tools
