#include "cli/commands.hpp"

#include "hidsense/descriptors.hpp"
#include "hidsense/registers.hpp"
#include "hidsense/sensor.hpp"
#include "hidsense/simulation.hpp"
#include "hidsense/tracer.hpp"

#ifdef HIDSENSE_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hidsense::cli {
namespace {

namespace fs = std::filesystem;

// Raised for bad flag values detected after CLI11 parsing.
struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write failed: " + path.string());
}

void write_file(const fs::path& path, const Bytes& data) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + ": '" + text + "'");
  }
}

std::uint8_t parse_byte(const std::string& text, const std::string& what) {
  const auto v = parse_u64(text, what);
  if (v > 0xFF) throw UsageError(what + " out of range: " + text);
  return static_cast<std::uint8_t>(v);
}

Micros seconds_to_micros(double s) {
  return static_cast<Micros>(std::llround(s * static_cast<double>(kMicrosPerSecond)));
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string sensor = "constant:2.5";
  std::string sensor_file;
  double duration = 13.0;
  double poll_ms = 10.0;
  std::vector<std::string> regs;
  std::optional<double> unplug_at;
  std::string trace_out;
  std::string csv_out;
  std::optional<std::string> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  SimulationConfig cfg;
  cfg.duration = seconds_to_micros(a.duration);
  cfg.host_poll = static_cast<Micros>(std::llround(a.poll_ms * kMicrosPerMilli));
  if (cfg.duration <= 0) throw UsageError("--duration must be positive");
  if (cfg.host_poll < kMicrosPerMilli) throw UsageError("--poll-ms must be at least 1");

  bool seeded_by_file = false;
  try {
    if (!a.sensor_file.empty()) {
      const std::string text = read_file(a.sensor_file);
      cfg.sensor = firmware::parse_sensor_file(text);
      seeded_by_file = text.find("seed") != std::string::npos;
    } else {
      cfg.sensor = firmware::parse_sensor_spec(a.sensor);
    }
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  if (a.seed) {
    cfg.sensor.seed = parse_u64(*a.seed, "--seed");
  } else if (!seeded_by_file) {
    if (const char* env = std::getenv("HIDSENSE_SEED"); env && *env) {
      cfg.sensor.seed = parse_u64(env, "HIDSENSE_SEED");
    }
  }

  for (const auto& assignment : a.regs) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw UsageError("--reg expects NAME=VALUE, got '" + assignment + "'");
    const std::string name = assignment.substr(0, eq);
    const auto field = registers::field_by_name(name);
    if (!field) throw UsageError("unknown register '" + name + "'");
    cfg.registers.*(*field) = parse_byte(assignment.substr(eq + 1), name);
  }

  if (a.unplug_at) cfg.unplug_at = seconds_to_micros(*a.unplug_at);

  for (const auto& f : registers::validate_firmware_config(cfg.registers)) {
    err << (f.severity == registers::Severity::Fatal ? "error: " : "warning: ") << f.message << '\n';
  }

  std::optional<Simulation> sim;
  try {
    sim.emplace(cfg);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  sim->run();

  for (const auto& line : sim->host().transcript()) out << line << '\n';

  if (!a.trace_out.empty()) write_file(a.trace_out, tracer::render(sim->trace(), true));
  if (!a.csv_out.empty()) write_file(a.csv_out, host::history_csv(sim->host().state()));
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_descriptors_dump(const std::string& dir, std::ostream& out) {
  const auto set = descriptors::build_reference_descriptor_set();
  const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(base);

  std::ostringstream text;
  auto emit = [&](const std::string& name, const Bytes& bytes, const std::string& title,
                  const std::vector<descriptors::Annotation>& rows) {
    write_file(base / name, bytes);
    out << "wrote " << (base / name).string() << " (" << bytes.size() << " bytes)\n";
    text << "== " << title << " (" << bytes.size() << " bytes)\n"
         << descriptors::render_annotations(rows) << '\n';
  };

  const Bytes device = descriptors::serialize(set.device);
  emit("device.bin", device, "device", descriptors::annotate_device(device));
  const Bytes config = descriptors::serialize(set.configuration);
  emit("configuration.bin", config, "configuration", descriptors::annotate_configuration(config));
  const Bytes report = descriptors::serialize(set.report);
  emit("report.bin", report, "report", descriptors::annotate_report(report));
  for (std::uint8_t i = 0; i <= set.strings.strings.size(); ++i) {
    const Bytes s = *set.strings.descriptor(i);
    const std::string name = "string" + std::to_string(i) + ".bin";
    emit(name, s, "string " + std::to_string(i), descriptors::annotate_string(s, i == 0));
  }

  const fs::path listing = base / "descriptors.txt";
  write_file(listing, text.str());
  out << "wrote " << listing.string() << '\n';
  return kExitOk;
}

int cmd_descriptors_parse(const std::string& path, std::ostream& out) {
  const std::string raw = read_file(path);
  const Bytes bytes(raw.begin(), raw.end());
  if (bytes.empty()) throw ParseError("empty descriptor file");

  char buf[16];
  auto hex16 = [&buf](unsigned v) {
    std::snprintf(buf, sizeof buf, "0x%04X", v);
    return std::string(buf);
  };

  const bool standard = bytes.size() >= 2 && bytes[0] >= 2 && bytes[0] <= bytes.size();
  if (standard && bytes[1] == descriptors::type::kDevice) {
    const auto d = descriptors::parse_device_descriptor(bytes);
    out << "kind=device\n"
        << "vid=" << hex16(d.vid) << "\npid=" << hex16(d.pid) << '\n'
        << "max_packet_size0=" << unsigned(d.max_packet_size0) << '\n'
        << "configurations=" << unsigned(d.num_configurations) << '\n'
        << descriptors::render_annotations(descriptors::annotate_device(bytes));
  } else if (standard && bytes[1] == descriptors::type::kConfiguration) {
    std::vector<std::string> warnings;
    const auto tree =
        descriptors::parse_configuration_tree(bytes, descriptors::ParseMode::Lenient, &warnings);
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    out << "kind=configuration\n"
        << "total_length=" << tree.config.total_length << '\n'
        << "interface_class=0x" << hex_byte(tree.interface.interface_class) << '\n'
        << "report_descriptor_length=" << tree.hid.report_descriptor_length << '\n';
    for (const auto& ep : tree.endpoints) {
      out << "endpoint=0x" << hex_byte(ep.address) << (ep.is_in() ? " IN" : " OUT")
          << " max_packet=" << ep.max_packet_size << " interval=" << unsigned(ep.interval_ms) << '\n';
    }
    out << descriptors::render_annotations(descriptors::annotate_configuration(bytes));
  } else if (standard && bytes[1] == descriptors::type::kString) {
    const auto text = descriptors::decode_string_descriptor(bytes);
    out << "kind=string\ntext=" << text << '\n'
        << descriptors::render_annotations(descriptors::annotate_string(bytes, false));
  } else {
    const auto report = descriptors::parse_report_descriptor(bytes);
    const auto s = report.summary();
    out << "kind=report\nitems=" << report.items.size() << '\n'
        << "input_bytes=" << s.input_bytes << "\noutput_bytes=" << s.output_bytes
        << "\nfeature_bytes=" << s.feature_bytes << '\n'
        << descriptors::render_annotations(descriptors::annotate_report(bytes));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_decode(const std::string& reg, const std::string& value, std::ostream& out) {
  const auto rows = registers::decode_named(reg, parse_byte(value, "--value"));
  if (!rows) throw UsageError("unknown register '" + reg + "'");
  for (const auto& [name, v] : *rows) out << name << '=' << v << '\n';
  return kExitOk;
}

int cmd_analyze(const std::string& path, bool verbose, std::ostream& out) {
  const auto log = tracer::parse(read_file(path));
  out << tracer::render(log, verbose) << '\n' << tracer::render_summary(tracer::summarize(log));
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"USB-HID skin-temperature telemetry simulator", "hidsense"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the firmware, bus and host together");
  simulate->add_option("--sensor", sim.sensor, "constant:V | ramp:START:RATE | sine:OFFSET:AMP:FREQ | steps:OFFSET:STEP:FREQ");
  auto* sensor_file = simulate->add_option("--sensor-file", sim.sensor_file, "key=value sensor description");
  simulate->get_option("--sensor")->excludes(sensor_file);
  simulate->add_option("--duration", sim.duration, "Simulated seconds")->check(CLI::PositiveNumber);
  simulate->add_option("--poll-ms", sim.poll_ms, "Host interrupt poll interval")->check(CLI::Range(1.0, 60000.0));
  simulate->add_option("--reg", sim.regs, "Register override NAME=VALUE");
  simulate->add_option("--unplug-at", sim.unplug_at, "Detach the device at this simulated second")->check(CLI::NonNegativeNumber);
  simulate->add_option("--trace-out", sim.trace_out, "Write the bus trace here");
  simulate->add_option("--csv-out", sim.csv_out, "Write host readings as CSV");
  simulate->add_option("--seed", sim.seed, "Sensor noise seed");

  std::string dump_dir;
  std::string parse_path;
  bool dump = false;
  auto* desc = app.add_subcommand("descriptors", "Dump or parse USB descriptors");
  auto* dump_flag = desc->add_flag("--dump", dump, "Write the reference descriptors");
  auto* parse_opt = desc->add_option("--parse", parse_path, "Parse a binary descriptor file");
  desc->add_option("--out", dump_dir, "Output directory for --dump")->needs(dump_flag);
  dump_flag->excludes(parse_opt);

  std::string reg;
  std::string value;
  auto* decode = app.add_subcommand("decode", "Decode a special function register value");
  decode->add_option("--reg", reg, "Register name")->required();
  decode->add_option("--value", value, "Byte value")->required();

  std::string trace_path;
  bool verbose = false;
  auto* analyze = app.add_subcommand("analyze", "Summarize a saved trace");
  analyze->add_option("path", trace_path, "Trace file")->required();
  analyze->add_flag("--verbose", verbose, "Include NAK and SERVICE lines in the echo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (desc->parsed()) {
      if (!dump && parse_path.empty()) throw UsageError("descriptors needs --dump or --parse FILE");
      return dump ? cmd_descriptors_dump(dump_dir, out) : cmd_descriptors_parse(parse_path, out);
    }
    if (decode->parsed()) return cmd_decode(reg, value, out);
    if (analyze->parsed()) return cmd_analyze(trace_path, verbose, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace hidsense::cli
