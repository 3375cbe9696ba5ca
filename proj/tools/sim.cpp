// Command-line driver: loads a flat RV32 kernel image, runs it on the
// simulated processor, and reports statistics as JSON.  --sweep re-runs the
// kernel across one numeric config axis and emits a JSON/CSV table.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "isa.hpp"
#include "processor.hpp"
#include "sweep.hpp"

using namespace gpusim;

namespace {

std::vector<uint8_t> read_file(const std::string& path, std::string& err) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    err = "cannot open '" + path + "'";
    return {};
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

bool parse_hex_u32(const std::string& s, uint32_t& out) {
  try {
    size_t pos = 0;
    unsigned long v = std::stoul(s, &pos, 0);
    if (pos != s.size() || v > 0xFFFFFFFFul) return false;
    out = static_cast<uint32_t>(v);
    return true;
  } catch (...) {
    return false;
  }
}

int fail_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle-level simulator for a RISC-V SIMT GPU"};
  app.get_formatter()->column_width(30);

  std::string kernel_path, config_path, out_path, trace_path, csv_path;
  std::string base_str, entry_str, sweep_spec;
  std::vector<std::string> texture_specs, set_specs;
  uint64_t max_cycles = 10000000;
  uint64_t trace_start = 0, trace_end = UINT64_MAX;

  app.add_option("--kernel", kernel_path, "flat RV32 kernel image")
      ->required();
  app.add_option("--base", base_str, "load base address (default 0x80000000)");
  app.add_option("--entry", entry_str, "entry PC (default: load base)");
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--out", out_path, "stats JSON path (default stdout)");
  app.add_option("--max-cycles", max_cycles, "simulation cycle limit");
  app.add_option("--trace", trace_path, "instruction trace output path");
  app.add_option("--trace-start", trace_start, "first traced cycle");
  app.add_option("--trace-end", trace_end, "last traced cycle");
  app.add_option("--texture", texture_specs,
                 "raw image preload, path:hexaddr (repeatable)");
  app.add_option("--sweep", sweep_spec, "axis sweep, key=v1,v2,...");
  app.add_option("--csv", csv_path, "CSV output path for sweeps");
  app.add_option("--set", set_specs, "config override, key=value (repeatable)");

  ProcessorConfig cfg;
  // One flag per config key.
  std::map<std::string, std::string> flag_values;
  for (const auto& [key, def] : config_dump(cfg)) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    app.add_option_function<std::string>(
        flag, [&flag_values, key = key](const std::string& v) {
          flag_values[key] = v;
        });
  }

  CLI11_PARSE(app, argc, argv);

  if (!config_path.empty()) {
    std::string err = config_parse_file(cfg, config_path);
    if (!err.empty()) return fail_usage(err);
  }
  for (const auto& spec : set_specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) return fail_usage("--set expects key=value");
    std::string err = config_set(cfg, spec.substr(0, eq), spec.substr(eq + 1));
    if (!err.empty()) return fail_usage(err);
  }
  for (const auto& [key, value] : flag_values) {
    std::string err = config_set(cfg, key, value);
    if (!err.empty()) return fail_usage(err);
  }
  std::string err = cfg.validate();
  if (!err.empty()) return fail_usage(err);

  KernelImage image;
  image.bytes = read_file(kernel_path, err);
  if (!err.empty()) return fail_usage(err);
  image.load_base = cfg.ram_base;
  if (!base_str.empty() && !parse_hex_u32(base_str, image.load_base))
    return fail_usage("bad --base value");
  image.entry = image.load_base;
  if (!entry_str.empty() && !parse_hex_u32(entry_str, image.entry))
    return fail_usage("bad --entry value");

  std::vector<TexturePreload> preloads;
  for (const auto& spec : texture_specs) {
    auto colon = spec.rfind(':');
    if (colon == std::string::npos)
      return fail_usage("--texture expects path:hexaddr");
    TexturePreload t;
    t.bytes = read_file(spec.substr(0, colon), err);
    if (!err.empty()) return fail_usage(err);
    if (!parse_hex_u32(spec.substr(colon + 1), t.addr))
      return fail_usage("bad --texture address");
    preloads.push_back(std::move(t));
  }

  auto write_output = [&](const std::string& text) -> int {
    if (out_path.empty()) {
      std::cout << text << "\n";
      return 0;
    }
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 1;
    }
    f << text << "\n";
    return 0;
  };

  if (!sweep_spec.empty()) {
    auto eq = sweep_spec.find('=');
    if (eq == std::string::npos)
      return fail_usage("--sweep expects key=v1,v2,...");
    std::string axis = sweep_spec.substr(0, eq);
    std::vector<std::string> values;
    std::stringstream ss(sweep_spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) values.push_back(item);
    if (values.empty()) return fail_usage("--sweep needs at least one value");
    auto points = run_sweep(cfg, axis, values, image, preloads, max_cycles);
    if (!csv_path.empty()) {
      std::ofstream f(csv_path);
      if (!f) return fail_usage("cannot write '" + csv_path + "'");
      f << sweep_to_csv(axis, points);
    }
    int rc = write_output(sweep_to_json(axis, points));
    if (rc) return rc;
    for (const auto& p : points)
      if (!p.ok) return 2;
    return 0;
  }

  Processor proc(cfg);
  err = proc.load_image(image);
  if (!err.empty()) return fail_usage(err);
  for (const auto& t : preloads)
    if (!proc.preload(t.addr, t.bytes.data(), t.bytes.size()))
      return fail_usage("texture preload outside RAM");

  std::ofstream trace_file;
  if (!trace_path.empty()) {
    if (trace_start > trace_end)
      return fail_usage("--trace-start must not exceed --trace-end");
    trace_file.open(trace_path);
    if (!trace_file) return fail_usage("cannot write '" + trace_path + "'");
    proc.set_trace([&](const TraceEvent& ev) {
      if (ev.cycle < trace_start || ev.cycle > trace_end) return;
      char head[64];
      std::snprintf(head, sizeof head, "%llu,%u,%u,%08x,%x,",
                    static_cast<unsigned long long>(ev.cycle), ev.core,
                    ev.wavefront, ev.pc, ev.tmask);
      trace_file << head << disassemble(ev.instr) << "\n";
    });
  }

  RunStats stats = proc.run(max_cycles);
  int rc = write_output(stats.to_json());
  if (rc) return rc;
  switch (stats.status) {
    case RunStatus::Completed: return 0;
    case RunStatus::Timeout:
      std::cerr << "timeout: work remaining after " << stats.cycles
                << " cycles\n";
      return 2;
    case RunStatus::Fault:
      std::cerr << "fault: " << stats.fault_message << "\n";
      return 3;
  }
  return 0;
}
