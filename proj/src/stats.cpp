#include "stats.hpp"

#include "json.hpp"

namespace gpusim {

namespace {

nlohmann::ordered_json cache_json(const CacheStats& s, bool enabled) {
  nlohmann::ordered_json j;
  j["enabled"] = enabled;
  j["accesses"] = s.accesses;
  j["hits"] = s.hits;
  j["misses"] = s.misses;
  j["deferrals"] = s.deferrals;
  j["backpressure"] = s.backpressure;
  j["bank_utilization"] = s.utilization();
  j["mshr_high_water"] = s.mshr_high_water;
  j["mem_requests"] = s.mem_requests;
  j["writebacks"] = s.writebacks;
  return j;
}

}  // namespace

std::string RunStats::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["cycles"] = cycles;
  j["instructions"] = instructions;
  j["lane_instructions"] = lane_instructions;
  j["ipc_total"] = ipc_total;
  j["lane_ipc"] = lane_ipc;
  j["ipc_per_core"] = ipc_per_core;
  j["instructions_per_core"] = instructions_per_core;
  j["caches"]["l1i"] = cache_json(l1i, true);
  j["caches"]["l1d"] = cache_json(l1d, true);
  j["caches"]["l2"] = cache_json(l2, l2_enabled);
  j["caches"]["l3"] = cache_json(l3, l3_enabled);
  j["shared_memory"]["accesses"] = shm_accesses;
  j["shared_memory"]["conflicts"] = shm_conflicts;
  j["dram"]["reads"] = dram_reads;
  j["dram"]["writes"] = dram_writes;
  j["texture"]["batches"] = tex.batches;
  j["texture"]["unique_texels"] = tex.unique_texels;
  j["texture"]["total_texels"] = tex.total_texels;
  j["texture"]["avg_batch_latency"] =
      tex.batches ? static_cast<double>(tex.batch_cycles) / tex.batches : 0.0;
  j["console"] = console;
  switch (status) {
    case RunStatus::Completed: j["terminated"] = "completed"; break;
    case RunStatus::Timeout: j["terminated"] = "timeout"; break;
    case RunStatus::Fault: j["terminated"] = "fault: " + fault_message; break;
  }
  return j.dump(2);
}

}  // namespace gpusim
