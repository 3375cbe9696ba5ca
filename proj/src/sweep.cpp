#include "sweep.hpp"

#include <future>
#include <sstream>

#include "json.hpp"

namespace gpusim {

std::vector<SweepPoint> run_sweep(const ProcessorConfig& base,
                                  const std::string& axis,
                                  const std::vector<std::string>& values,
                                  const KernelImage& image,
                                  const std::vector<TexturePreload>& preloads,
                                  uint64_t max_cycles) {
  auto run_one = [&](const std::string& value) {
    SweepPoint p;
    p.value = value;
    ProcessorConfig cfg = base;
    std::string err = config_set(cfg, axis, value);
    if (err.empty()) err = cfg.validate();
    if (!err.empty()) {
      p.error = err;
      return p;
    }
    Processor proc(cfg);
    err = proc.load_image(image);
    if (!err.empty()) {
      p.error = err;
      return p;
    }
    for (const auto& t : preloads) {
      if (!proc.preload(t.addr, t.bytes.data(), t.bytes.size())) {
        p.error = "texture preload outside RAM";
        return p;
      }
    }
    p.stats = proc.run(max_cycles);
    p.ok = p.stats.status == RunStatus::Completed;
    if (!p.ok)
      p.error = p.stats.status == RunStatus::Timeout ? "timeout"
                                                     : p.stats.fault_message;
    return p;
  };

  std::vector<std::future<SweepPoint>> futures;
  futures.reserve(values.size());
  for (const std::string& v : values)
    futures.push_back(std::async(std::launch::async, run_one, v));
  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

std::string sweep_to_json(const std::string& axis,
                          const std::vector<SweepPoint>& points) {
  nlohmann::ordered_json j;
  j["axis"] = axis;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json pj;
    pj["value"] = p.value;
    pj["ok"] = p.ok;
    if (!p.ok) pj["error"] = p.error;
    pj["stats"] = nlohmann::ordered_json::parse(p.stats.to_json());
    j["points"].push_back(pj);
  }
  return j.dump(2);
}

std::string sweep_to_csv(const std::string& axis,
                         const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << axis
      << ",ok,cycles,instructions,ipc_total,lane_ipc,l1d_utilization,"
         "l1d_hits,l1d_misses,dram_reads,dram_writes\n";
  for (const auto& p : points) {
    out << p.value << "," << (p.ok ? 1 : 0) << "," << p.stats.cycles << ","
        << p.stats.instructions << "," << p.stats.ipc_total << ","
        << p.stats.lane_ipc << "," << p.stats.l1d.utilization() << ","
        << p.stats.l1d.hits << "," << p.stats.l1d.misses << ","
        << p.stats.dram_reads << "," << p.stats.dram_writes << "\n";
  }
  return out.str();
}

}  // namespace gpusim
