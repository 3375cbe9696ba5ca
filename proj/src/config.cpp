#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace gpusim {

namespace {

bool is_pow2(uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

bool parse_u32(const std::string& s, uint32_t& out) {
  std::string t = s;
  int base = 10;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    t = t.substr(2);
    base = 16;
  }
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v, base);
  if (ec != std::errc() || p != t.data() + t.size() || v > 0xFFFFFFFFull)
    return false;
  out = static_cast<uint32_t>(v);
  return true;
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "1" || s == "true" || s == "on") { out = true; return true; }
  if (s == "0" || s == "false" || s == "off") { out = false; return true; }
  return false;
}

struct Key {
  const char* name;
  std::function<uint32_t*(ProcessorConfig&)> u32;
  std::function<bool*(ProcessorConfig&)> b = nullptr;
};

const std::vector<Key>& key_table() {
  auto u = [](uint32_t ProcessorConfig::* m) {
    return [m](ProcessorConfig& c) { return &(c.*m); };
  };
  auto cu = [](CacheConfig ProcessorConfig::* cm, uint32_t CacheConfig::* m) {
    return [cm, m](ProcessorConfig& c) { return &((c.*cm).*m); };
  };
  auto bb = [](bool ProcessorConfig::* m) {
    return [m](ProcessorConfig& c) { return &(c.*m); };
  };
  static const std::vector<Key> keys = {
      {"cores", u(&ProcessorConfig::num_cores)},
      {"clusters", u(&ProcessorConfig::num_clusters)},
      {"wavefronts", u(&ProcessorConfig::num_wavefronts)},
      {"threads", u(&ProcessorConfig::num_threads)},
      {"lat_alu", u(&ProcessorConfig::lat_alu)},
      {"lat_mul", u(&ProcessorConfig::lat_mul)},
      {"lat_div", u(&ProcessorConfig::lat_div)},
      {"lat_fp", u(&ProcessorConfig::lat_fp)},
      {"lat_fsqrt", u(&ProcessorConfig::lat_fsqrt)},
      {"lat_tex_issue", u(&ProcessorConfig::lat_tex_issue)},
      {"icache_size", cu(&ProcessorConfig::icache, &CacheConfig::size)},
      {"icache_line", cu(&ProcessorConfig::icache, &CacheConfig::line_size)},
      {"icache_banks", cu(&ProcessorConfig::icache, &CacheConfig::num_banks)},
      {"icache_assoc", cu(&ProcessorConfig::icache, &CacheConfig::associativity)},
      {"icache_mshr", cu(&ProcessorConfig::icache, &CacheConfig::mshr_entries)},
      {"icache_queue", cu(&ProcessorConfig::icache, &CacheConfig::input_queue_depth)},
      {"dcache_size", cu(&ProcessorConfig::dcache, &CacheConfig::size)},
      {"dcache_line", cu(&ProcessorConfig::dcache, &CacheConfig::line_size)},
      {"dcache_banks", cu(&ProcessorConfig::dcache, &CacheConfig::num_banks)},
      {"dcache_ports", cu(&ProcessorConfig::dcache, &CacheConfig::num_ports)},
      {"dcache_assoc", cu(&ProcessorConfig::dcache, &CacheConfig::associativity)},
      {"dcache_mshr", cu(&ProcessorConfig::dcache, &CacheConfig::mshr_entries)},
      {"dcache_queue", cu(&ProcessorConfig::dcache, &CacheConfig::input_queue_depth)},
      {"dcache_fill_queue", cu(&ProcessorConfig::dcache, &CacheConfig::fill_queue_depth)},
      {"dcache_memreq_queue", cu(&ProcessorConfig::dcache, &CacheConfig::memreq_queue_depth)},
      {"l2_size", cu(&ProcessorConfig::l2, &CacheConfig::size)},
      {"l2_line", cu(&ProcessorConfig::l2, &CacheConfig::line_size)},
      {"l2_banks", cu(&ProcessorConfig::l2, &CacheConfig::num_banks)},
      {"l2_assoc", cu(&ProcessorConfig::l2, &CacheConfig::associativity)},
      {"l2_mshr", cu(&ProcessorConfig::l2, &CacheConfig::mshr_entries)},
      {"l2_queue", cu(&ProcessorConfig::l2, &CacheConfig::input_queue_depth)},
      {"l3_size", cu(&ProcessorConfig::l3, &CacheConfig::size)},
      {"l3_line", cu(&ProcessorConfig::l3, &CacheConfig::line_size)},
      {"l3_banks", cu(&ProcessorConfig::l3, &CacheConfig::num_banks)},
      {"l3_assoc", cu(&ProcessorConfig::l3, &CacheConfig::associativity)},
      {"l3_mshr", cu(&ProcessorConfig::l3, &CacheConfig::mshr_entries)},
      {"mem_latency", u(&ProcessorConfig::mem_latency)},
      {"mem_bandwidth", u(&ProcessorConfig::mem_bandwidth)},
      {"ram_size", u(&ProcessorConfig::ram_size)},
      {"shm_size", u(&ProcessorConfig::shm_size)},
      {"stack_size", u(&ProcessorConfig::stack_size)},
      {"ipdom_depth", u(&ProcessorConfig::ipdom_depth)},
      {"num_barriers", u(&ProcessorConfig::num_barriers)},
      {"tex_stages", u(&ProcessorConfig::tex_stages)},
      {"tex_queue", u(&ProcessorConfig::tex_queue_depth)},
      {"l2", {}, bb(&ProcessorConfig::l2_enable)},
      {"l3", {}, bb(&ProcessorConfig::l3_enable)},
      {"tex_dedup", {}, bb(&ProcessorConfig::tex_dedup)},
  };
  return keys;
}

std::string check_cache(const char* name, const CacheConfig& c,
                        uint32_t num_threads) {
  std::ostringstream e;
  if (c.line_size < 4 || !is_pow2(c.line_size))
    e << name << ": line_size must be a power of two >= 4";
  else if (!is_pow2(c.num_banks))
    e << name << ": num_banks must be a power of two";
  else if (c.num_banks * c.line_size > c.size)
    e << name << ": num_banks * line_size exceeds total size";
  else if (c.associativity < 1)
    e << name << ": associativity must be >= 1";
  else if (c.num_lines() % (c.num_banks * c.associativity) != 0)
    e << name << ": size not divisible into banks x ways";
  else if (c.num_ports != 1 && c.num_ports != 2 && c.num_ports != 4)
    e << name << ": num_ports must be 1, 2 or 4";
  else if (c.num_ports > num_threads)
    e << name << ": num_ports must not exceed threads per wavefront";
  else if (c.mshr_entries < 1 || c.input_queue_depth < 1 ||
           c.fill_queue_depth < 1 || c.memreq_queue_depth < 1)
    e << name << ": queue and MSHR depths must be >= 1";
  return e.str();
}

}  // namespace

std::string ProcessorConfig::validate() const {
  std::ostringstream e;
  if (num_cores < 1 || num_wavefronts < 1 || num_threads < 1 ||
      num_clusters < 1)
    return "core, cluster, wavefront and thread counts must be >= 1";
  if (num_threads > 32) return "threads per wavefront limited to 32";
  if (num_wavefronts > 32) return "wavefronts per core limited to 32";
  if (num_cores % num_clusters != 0)
    return "cores must divide evenly into clusters";
  if (mem_latency < 1) return "mem_latency must be >= 1";
  if (mem_bandwidth < 1) return "mem_bandwidth must be >= 1";
  if (lat_alu < 1 || lat_mul < 1 || lat_div < 1 || lat_fp < 1 ||
      lat_fsqrt < 1)
    return "latencies must be >= 1";
  std::string err = check_cache("icache", icache, num_threads);
  if (err.empty()) err = check_cache("dcache", dcache, num_threads);
  if (err.empty() && l2_enable) err = check_cache("l2", l2, num_threads);
  if (err.empty() && l3_enable) err = check_cache("l3", l3, num_threads);
  if (!err.empty()) return err;
  if (icache.num_ports != 1)
    return "icache is single-ported";
  if (l2_enable && l2.line_size != dcache.line_size)
    return "l2 line_size must match the L1 line_size";
  if (l3_enable && l3.line_size != dcache.line_size)
    return "l3 line_size must match the L1 line_size";
  if (icache.line_size != dcache.line_size)
    return "icache and dcache line sizes must match";
  if (ram_size < (1u << 16)) return "ram_size too small";
  if (shm_size < 4 || shm_size % 4 != 0)
    return "shm_size must be a positive multiple of 4";
  if (stack_size < 64) return "stack_size too small";
  if (tex_stages < 1 || tex_stages > 8) return "tex_stages must be in 1..8";
  uint64_t stacks = static_cast<uint64_t>(num_cores) * num_wavefronts *
                    num_threads * stack_size;
  if (stacks >= ram_size) return "per-thread stacks do not fit in RAM";
  return "";
}

std::string config_set(ProcessorConfig& cfg, const std::string& key,
                       const std::string& value) {
  for (const auto& k : key_table()) {
    if (key != k.name) continue;
    if (k.b) {
      bool v;
      if (!parse_bool(value, v)) return "bad boolean for key '" + key + "'";
      *k.b(cfg) = v;
      return "";
    }
    uint32_t v;
    if (!parse_u32(value, v)) return "bad number for key '" + key + "'";
    *k.u32(cfg) = v;
    return "";
  }
  return "unknown config key '" + key + "'";
}

std::string config_parse_text(ProcessorConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      return "line " + std::to_string(lineno) + ": expected key = value";
    std::string err = config_set(cfg, trim(t.substr(0, eq)),
                                 trim(t.substr(eq + 1)));
    if (!err.empty()) return "line " + std::to_string(lineno) + ": " + err;
  }
  return "";
}

std::string config_parse_file(ProcessorConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) return "cannot open config file '" + path + "'";
  std::ostringstream ss;
  ss << f.rdbuf();
  return config_parse_text(cfg, ss.str());
}

std::map<std::string, std::string> config_dump(const ProcessorConfig& cfg) {
  std::map<std::string, std::string> out;
  ProcessorConfig& c = const_cast<ProcessorConfig&>(cfg);
  for (const auto& k : key_table()) {
    if (k.b)
      out[k.name] = *k.b(c) ? "1" : "0";
    else
      out[k.name] = std::to_string(*k.u32(c));
  }
  return out;
}

}  // namespace gpusim
