#pragma once

// Flat key/value config files ("key = value", '#' comments) for model and
// hardware descriptions. Unknown or malformed keys are hard errors that name
// the offending key.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "archspec.hpp"
#include "perf.hpp"

namespace ssmperf {

namespace io_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::map<std::string, std::string> parse_kv(std::istream& is, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key))
      throw ConfigError(origin + ": duplicate key '" + key + "'");
    kv[key] = val;
  }
  return kv;
}

inline std::int64_t to_int(const std::string& key, const std::string& v, const std::string& origin) {
  try {
    size_t pos = 0;
    // allow scientific notation for large integral values
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    const std::int64_t i = static_cast<std::int64_t>(std::llround(d));
    if (std::abs(d - static_cast<double>(i)) > 1e-6)
      throw ConfigError(origin + ": key '" + key + "' must be integral, got '" + v + "'");
    return i;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(origin + ": key '" + key + "' has invalid numeric value '" + v + "'");
  }
}

inline double to_double(const std::string& key, const std::string& v, const std::string& origin) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(origin + ": key '" + key + "' has invalid numeric value '" + v + "'");
  }
}

inline std::map<std::string, std::string> read_file_kv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_kv(f, path);
}

}  // namespace io_detail

inline VariantKind variant_from_string(const std::string& s) {
  if (s == "mamba1") return VariantKind::Mamba1;
  if (s == "mamba2") return VariantKind::Mamba2;
  if (s == "mamba3") return VariantKind::Mamba3;
  throw ConfigError("unknown variant '" + s + "' (expected mamba1|mamba2|mamba3)");
}

inline Formulation formulation_from_string(const std::string& s) {
  if (s == "sequential") return Formulation::Sequential;
  if (s == "pscan") return Formulation::PScan;
  if (s == "ssd") return Formulation::SSD;
  throw ConfigError("unknown formulation '" + s + "' (expected sequential|pscan|ssd)");
}

inline ModelConfig load_model_config(const std::string& path) {
  auto kv = io_detail::read_file_kv(path);
  ModelConfig c;
  auto take = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(path + ": missing required key '" + std::string(key) + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_opt = [&](const char* key, std::int64_t dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    const std::int64_t v = io_detail::to_int(key, it->second, path);
    kv.erase(it);
    return v;
  };
  c.variant = variant_from_string(take("variant"));
  c.d_model = io_detail::to_int("d_model", take("d_model"), path);
  c.n_layers = io_detail::to_int("n_layers", take("n_layers"), path);
  c.d_state = io_detail::to_int("d_state", take("d_state"), path);
  c.expand = io_detail::to_double("expand", take("expand"), path);
  c.d_conv = take_opt("d_conv", 4);
  c.dt_rank = take_opt("dt_rank", 0);
  c.n_heads = take_opt("n_heads", 1);
  c.head_dim = take_opt("head_dim", 0);
  c.mimo_rank = take_opt("mimo_rank", 1);
  c.vocab_size = take_opt("vocab_size", 0);
  if (!kv.empty())
    throw ConfigError(path + ": unknown key '" + kv.begin()->first + "'");
  validate(c);
  return c;
}

inline HardwareConfig load_hw_config(const std::string& path) {
  auto kv = io_detail::read_file_kv(path);
  HardwareConfig h;
  auto take_int = [&](const char* key, std::int64_t dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    const std::int64_t v = io_detail::to_int(key, it->second, path);
    kv.erase(it);
    return v;
  };
  auto take_dbl = [&](const char* key, double dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    const double v = io_detail::to_double(key, it->second, path);
    kv.erase(it);
    return v;
  };
  h.mac_units = take_int("mac_units", h.mac_units);
  h.simd_lanes = take_int("simd_lanes", h.simd_lanes);
  h.clock_hz = take_dbl("clock_hz", h.clock_hz);
  h.sram_bytes = take_int("sram_bytes", h.sram_bytes);
  h.dram_bw_bytes_per_s = take_dbl("dram_bw_bytes_per_s", h.dram_bw_bytes_per_s);
  h.e_mem_pj_per_bit = take_dbl("e_mem_pj_per_bit", h.e_mem_pj_per_bit);
  h.e_op_pj = take_dbl("e_op_pj", h.e_op_pj);
  h.weight_bits = take_int("weight_bits", h.weight_bits);
  h.act_bits = take_int("act_bits", h.act_bits);
  h.state_bits = take_int("state_bits", h.state_bits);
  if (!kv.empty())
    throw ConfigError(path + ": unknown key '" + kv.begin()->first + "'");
  validate(h);
  return h;
}

inline std::string serialize(const ModelConfig& c) {
  std::ostringstream os;
  os << "variant = " << to_string(c.variant) << "\n"
     << "d_model = " << c.d_model << "\n"
     << "n_layers = " << c.n_layers << "\n"
     << "d_state = " << c.d_state << "\n"
     << "expand = " << c.expand << "\n"
     << "d_conv = " << c.d_conv << "\n";
  if (c.variant == VariantKind::Mamba1) os << "dt_rank = " << c.dt_rank_effective() << "\n";
  if (c.variant != VariantKind::Mamba1)
    os << "n_heads = " << c.n_heads << "\n"
       << "head_dim = " << c.head_dim << "\n";
  os << "mimo_rank = " << c.mimo_rank << "\n"
     << "vocab_size = " << c.vocab_size << "\n";
  return os.str();
}

// FNV-1a, for config provenance hashes in reports.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open file '" + path + "' for hashing");
  std::ostringstream ss;
  ss << f.rdbuf();
  return fnv1a(ss.str());
}

}  // namespace ssmperf
