/*
 * Copyright 2026 The Crane Teleop Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference vs OpenMP for the two data-parallel kernels: batch gain
// validation and sweep cells.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "crane/stability.hpp"
#include "crane/sweep.hpp"

namespace {

using namespace crane;

std::vector<stability::GainSet> gain_batch(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e3));
  std::vector<stability::GainSet> out(n);
  for (auto& g : out) {
    g = {std::exp(u(rng)), std::exp(u(rng)), -std::exp(u(rng)),
         std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
  }
  return out;
}

void BM_CheckGainsSerial(benchmark::State& state) {
  const auto gains = gain_batch(static_cast<std::size_t>(state.range(0)));
  const PhysParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability::check_gains_batch_serial(gains, p, 0.72));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CheckGainsParallel(benchmark::State& state) {
  const auto gains = gain_batch(static_cast<std::size_t>(state.range(0)));
  const PhysParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stability::check_gains_batch_parallel(gains, p, 0.72));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct SweepInput {
  Json base;
  std::vector<sweep::GridAxis> axes;
};

SweepInput robustness_sweep() {
  const std::string dir = CRANE_SCENARIO_DIR;
  return {load_json(dir + "/robustness_base.json"),
          sweep::parse_grid(load_json(dir + "/grids/robustness_M_grid.json"))};
}

void BM_SweepSerial(benchmark::State& state) {
  const SweepInput in = robustness_sweep();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep::run_cells_serial(in.base, in.axes));
  }
}

void BM_SweepParallel(benchmark::State& state) {
  const SweepInput in = robustness_sweep();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep::run_cells_parallel(in.base, in.axes));
  }
}

BENCHMARK(BM_CheckGainsSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_CheckGainsParallel)->Arg(1000)->Arg(100000);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
