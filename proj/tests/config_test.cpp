#include "doctest.h"

#include "config.hpp"

using namespace gpusim;

TEST_CASE("defaults validate") {
  ProcessorConfig cfg;
  CHECK(cfg.validate() == "");
}

TEST_CASE("key-value text parsing with overrides and comments") {
  ProcessorConfig cfg;
  std::string err = config_parse_text(cfg,
                                      "# comment line\n"
                                      "cores = 4\n"
                                      "dcache_ports = 4   # trailing\n"
                                      "mem_latency = 0x20\n"
                                      "\n"
                                      "l2 = true\n");
  CHECK(err == "");
  CHECK(cfg.num_cores == 4);
  CHECK(cfg.dcache.num_ports == 4);
  CHECK(cfg.mem_latency == 0x20);
  CHECK(cfg.l2_enable);
}

TEST_CASE("unknown keys are errors") {
  ProcessorConfig cfg;
  CHECK(config_set(cfg, "warp_speed", "9") != "");
  CHECK(config_parse_text(cfg, "nonsense = 1\n") != "");
  CHECK(config_parse_text(cfg, "cores 4\n") != "");
  CHECK(config_set(cfg, "cores", "four") != "");
}

TEST_CASE("validation catches bad shapes") {
  ProcessorConfig cfg;
  cfg.num_threads = 64;
  CHECK(cfg.validate() != "");

  cfg = ProcessorConfig{};
  cfg.dcache.num_banks = 3;
  CHECK(cfg.validate() != "");

  cfg = ProcessorConfig{};
  cfg.dcache.num_ports = 8;
  CHECK(cfg.validate() != "");

  cfg = ProcessorConfig{};
  cfg.num_threads = 2;
  cfg.dcache.num_ports = 4;  // more ports than lanes
  CHECK(cfg.validate() != "");

  cfg = ProcessorConfig{};
  cfg.mem_latency = 0;  // minimum latency is one cycle
  CHECK(cfg.validate() != "");

  cfg = ProcessorConfig{};
  cfg.l2_enable = true;
  cfg.l2.line_size = 64;  // levels must share a line size
  CHECK(cfg.validate() != "");
}

TEST_CASE("a fully defaulted run is valid and every key has a value") {
  ProcessorConfig cfg;
  auto dump = config_dump(cfg);
  CHECK(dump.size() > 30);
  for (const auto& [k, v] : dump) {
    CHECK(!v.empty());
    ProcessorConfig copy;
    CHECK(config_set(copy, k, v) == "");
  }
}
