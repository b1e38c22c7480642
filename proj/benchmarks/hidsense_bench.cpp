#include "hidsense/descriptors.hpp"
#include "hidsense/host.hpp"
#include "hidsense/pipeline.hpp"
#include "hidsense/simulation.hpp"
#include "hidsense/tracer.hpp"

#include <benchmark/benchmark.h>

using namespace hidsense;

static void BM_PipelineAllCodes(benchmark::State& state) {
  for (auto _ : state) {
    for (int c = 0; c <= firmware::AdcCode::kMax; ++c) {
      benchmark::DoNotOptimize(firmware::make_report(firmware::AdcCode(c)));
    }
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_PipelineAllCodes);

static void BM_ParseReportDescriptor(benchmark::State& state) {
  const auto bytes = descriptors::serialize(descriptors::build_reference_report_descriptor());
  for (auto _ : state) {
    benchmark::DoNotOptimize(descriptors::parse_report_descriptor(bytes).summary());
  }
}
BENCHMARK(BM_ParseReportDescriptor);

static void BM_ParseConfigurationTree(benchmark::State& state) {
  const auto bytes = descriptors::serialize(descriptors::build_reference_descriptor_set().configuration);
  for (auto _ : state) benchmark::DoNotOptimize(descriptors::parse_configuration_tree(bytes));
}
BENCHMARK(BM_ParseConfigurationTree);

static void BM_DecodeReport(benchmark::State& state) {
  const Bytes payload{0, '2', '5', '0', ' '};
  for (auto _ : state) benchmark::DoNotOptimize(host::decode_report(payload));
}
BENCHMARK(BM_DecodeReport);

namespace {

const tracer::TraceLog& reference_trace() {
  static const tracer::TraceLog log = [] {
    SimulationConfig cfg;
    cfg.sensor = firmware::parse_sensor_spec("constant:2.5");
    Simulation sim(cfg);
    sim.run();
    return sim.trace();
  }();
  return log;
}

}  // namespace

static void BM_TraceRender(benchmark::State& state) {
  const auto& log = reference_trace();
  for (auto _ : state) benchmark::DoNotOptimize(tracer::render(log, true));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.size()));
}
BENCHMARK(BM_TraceRender);

static void BM_TraceParse(benchmark::State& state) {
  const auto text = tracer::render(reference_trace(), true);
  for (auto _ : state) benchmark::DoNotOptimize(tracer::parse(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_TraceParse);

static void BM_Simulate13s(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.sensor = firmware::parse_sensor_spec("constant:2.5");
  cfg.trace_keepalive = state.range(0) != 0;
  for (auto _ : state) {
    Simulation sim(cfg);
    sim.run();
    benchmark::DoNotOptimize(sim.host().state().history.size());
  }
}
BENCHMARK(BM_Simulate13s)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
