#include "config_io.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "amdi/keyrate.hpp"
#include "json.hpp"

namespace amdi::tools {

namespace {

template <class T>
void read(const YAML::Node& sec, const std::string& where, const std::string& key, T& out) {
  try {
    out = sec[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: bad value for " + where + key);
  }
}

using Setter = std::function<void(const YAML::Node&, const std::string&)>;

void apply_section(const YAML::Node& node, const std::string& name, const std::map<std::string, Setter>& fields) {
  if (!node.IsMap()) throw ConfigError("config: section " + name + " must be a map");
  for (const auto& kv : node) {
    auto key = kv.first.as<std::string>();
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("config: unknown key " + name + "." + key);
    it->second(node, key);
  }
}

#define FIELD(sec, var, name) \
  {#name, [&](const YAML::Node& n, const std::string& k) { read(n, sec ".", k, var.name); }}

}  // namespace

ProtocolConfig parse_config(const std::string& text, const ProtocolConfig& base) {
  ProtocolConfig c = base;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (root.IsNull()) return c;
  if (!root.IsMap()) throw ConfigError("config: top level must be a map");

  std::map<std::string, Setter> source{FIELD("source", c.source, mu),   FIELD("source", c.source, nu),
                                       FIELD("source", c.source, o),    FIELD("source", c.source, p_mu),
                                       FIELD("source", c.source, p_nu), FIELD("source", c.source, p_o),
                                       FIELD("source", c.source, M)};
  std::map<std::string, Setter> channel{FIELD("channel", c.channel, distance_km), FIELD("channel", c.channel, alpha_db_per_km),
                                        FIELD("channel", c.channel, eta_det),     FIELD("channel", c.channel, p_d),
                                        FIELD("channel", c.channel, e_d)};
  std::map<std::string, Setter> timing{FIELD("timing", c.timing, clock_hz),          FIELD("timing", c.timing, delta_f_hz),
                                       FIELD("timing", c.timing, omega_fiber_rad_s), FIELD("timing", c.timing, t_c_s),
                                       FIELD("timing", c.timing, phase_locked)};
  std::map<std::string, Setter> security{
      FIELD("security", c.security, eps_cor),      FIELD("security", c.security, eps_prime),
      FIELD("security", c.security, eps_hat),      FIELD("security", c.security, eps_e),
      FIELD("security", c.security, eps_pa),       FIELD("security", c.security, eps_chernoff),
      FIELD("security", c.security, total_pulses), FIELD("security", c.security, error_correction_f)};

  for (const auto& kv : root) {
    auto key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "source") apply_section(v, key, source);
    else if (key == "channel") apply_section(v, key, channel);
    else if (key == "timing") apply_section(v, key, timing);
    else if (key == "security") apply_section(v, key, security);
    else if (key == "n_users") read(root, "", key, c.n_users);
    else if (key == "click_filtering") read(root, "", key, c.click_filtering);
    else if (key == "extended_z_sets") read(root, "", key, c.extended_z_sets);
    else if (key == "quad_points") read(root, "", key, c.quad_points);
    else throw ConfigError("config: unknown key " + key);
  }
  return c;
}

#undef FIELD

ProtocolConfig load_config(const std::string& path, const ProtocolConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string dump_config(const ProtocolConfig& c) {
  auto d = [](double x) { return format_double(x); };
  auto b = [](bool x) { return x ? "true" : "false"; };
  std::ostringstream os;
  os << "n_users: " << c.n_users << "\n"
     << "click_filtering: " << b(c.click_filtering) << "\n"
     << "extended_z_sets: " << b(c.extended_z_sets) << "\n"
     << "quad_points: " << c.quad_points << "\n"
     << "source:\n"
     << "  mu: " << d(c.source.mu) << "\n  nu: " << d(c.source.nu) << "\n  o: " << d(c.source.o)
     << "\n  p_mu: " << d(c.source.p_mu) << "\n  p_nu: " << d(c.source.p_nu) << "\n  p_o: " << d(c.source.p_o)
     << "\n  M: " << c.source.M << "\n"
     << "channel:\n"
     << "  distance_km: " << d(c.channel.distance_km) << "\n  alpha_db_per_km: " << d(c.channel.alpha_db_per_km)
     << "\n  eta_det: " << d(c.channel.eta_det) << "\n  p_d: " << d(c.channel.p_d) << "\n  e_d: " << d(c.channel.e_d)
     << "\n"
     << "timing:\n"
     << "  clock_hz: " << d(c.timing.clock_hz) << "\n  delta_f_hz: " << d(c.timing.delta_f_hz)
     << "\n  omega_fiber_rad_s: " << d(c.timing.omega_fiber_rad_s) << "\n  t_c_s: " << d(c.timing.t_c_s)
     << "\n  phase_locked: " << b(c.timing.phase_locked) << "\n"
     << "security:\n"
     << "  eps_cor: " << d(c.security.eps_cor) << "\n  eps_prime: " << d(c.security.eps_prime)
     << "\n  eps_hat: " << d(c.security.eps_hat) << "\n  eps_e: " << d(c.security.eps_e)
     << "\n  eps_pa: " << d(c.security.eps_pa) << "\n  eps_chernoff: " << d(c.security.eps_chernoff)
     << "\n  total_pulses: " << d(c.security.total_pulses)
     << "\n  error_correction_f: " << d(c.security.error_correction_f) << "\n";
  return os.str();
}

std::string RunManifest::hash() const {
  std::string text = command + "\n" + config + "\nseed: " + std::to_string(seed) + "\nmode: " + mode + "\n";
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("manifest: SHA-1 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  j["mode"] = mode;
  j["hash"] = hash();
  j["timestamp"] = timestamp;
  j["config"] = config;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace amdi::tools
