#include <benchmark/benchmark.h>

#include "rttslam/loop_closure.hpp"
#include "rttslam/pdr.hpp"
#include "rttslam/simulator.hpp"

namespace {

using namespace rttslam;

SimOutput walk(int laps, double rtt_noise = 0.5) {
  SimConfig cfg = SimConfig::home_scenario();
  cfg.laps = laps;
  cfg.step_length_noise_sigma = 0.03;
  cfg.heading_noise_sigma = 0.02;
  cfg.rtt_noise_sigma = rtt_noise;
  cfg.seed = 3;
  return generate_walk(cfg);
}

void BM_DetectLoopClosures(benchmark::State& state) {
  const SimOutput sim = walk(static_cast<int>(state.range(0)));
  ClusterConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_loop_closures(sim.rtt_observations, cfg));
  }
  state.SetLabel(std::to_string(sim.rtt_observations.size()) +
                 " observations");
}
BENCHMARK(BM_DetectLoopClosures)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_RttDistance(benchmark::State& state) {
  const SimOutput sim = walk(1);
  const RttObservation& a = sim.rtt_observations.front();
  const RttObservation& b = sim.rtt_observations.back();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rtt_distance(a, b, 4));
  }
}
BENCHMARK(BM_RttDistance);

void BM_RunPdr(benchmark::State& state) {
  const SimOutput sim = walk(static_cast<int>(state.range(0)), 0.0);
  const PdrConfig cfg;
  const auto imu = synth_imu(sim.noisy_steps, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_pdr(imu, cfg));
  }
  state.SetLabel(std::to_string(imu.size()) + " samples");
}
BENCHMARK(BM_RunPdr)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Lowpass(benchmark::State& state) {
  const SimOutput sim = walk(5, 0.0);
  const auto imu = synth_imu(sim.noisy_steps, PdrConfig{});
  const ScalarSeries series = accel_magnitudes(imu);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowpass(series, 3.0));
  }
}
BENCHMARK(BM_Lowpass);

}  // namespace
