// Copyright 2026 The psmfuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <filesystem>

#include "psmfuzz/io.hpp"
#include "psmfuzz/pltl.hpp"
#include "psmfuzz/psm.hpp"
#include "psmfuzz/skeleton.hpp"
#include "psmfuzz/trace_builder.hpp"

namespace {

using namespace psmfuzz;

const std::filesystem::path kLte = std::filesystem::path(PSMFUZZ_MODELS_DIR) / "lte";

struct Inputs {
  GuidingPsm psm = parse_psm(read_file(kLte / "lte.psm"));
  PropertySet props = parse_properties(read_file(kLte / "running.props"));
  TestSkeleton guti = generate_skeletons(*props.find("phi_g")->formula, 8, "phi_g").at(0);
};

const Inputs& inputs() {
  static const Inputs in;
  return in;
}

// Length budget sweep for the GUTI skeleton at two mutations.
void BM_BuildGuti(benchmark::State& state) {
  const auto& in = inputs();
  Budget b{static_cast<std::size_t>(state.range(0)), 2};
  std::size_t n = 0;
  for (auto _ : state) {
    auto traces = build_traces(in.psm, in.guti, b, kUncapped);
    n = traces.size();
    benchmark::DoNotOptimize(traces);
  }
  state.counters["traces"] = static_cast<double>(n);
}
BENCHMARK(BM_BuildGuti)->DenseRange(7, 10)->Unit(benchmark::kMillisecond);

void BM_BruteForceGuti(benchmark::State& state) {
  const auto& in = inputs();
  Budget b{static_cast<std::size_t>(state.range(0)), 2};
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_traces(in.psm, in.guti, b));
}
BENCHMARK(BM_BruteForceGuti)->DenseRange(7, 8)->Unit(benchmark::kMillisecond);

void BM_GenerateSkeletons(benchmark::State& state) {
  const auto& in = inputs();
  for (auto _ : state)
    for (const auto& p : in.props.properties())
      benchmark::DoNotOptimize(generate_skeletons(*p.formula, 8, p.id));
}
BENCHMARK(BM_GenerateSkeletons);

void BM_Evaluate(benchmark::State& state) {
  const auto& in = inputs();
  auto trace = run(in.psm, {parse_symbol("enable_s1{}"), parse_symbol("authentication_request{}"),
                            parse_symbol("security_mode_command{}"),
                            parse_symbol("rrc_security_mode_command{}"),
                            parse_symbol("attach_accept{}"),
                            parse_symbol("guti_reallocation_command{}")})
                   .observations;
  for (auto _ : state)
    for (const auto& p : in.props.properties()) benchmark::DoNotOptimize(evaluate(*p.formula, trace));
}
BENCHMARK(BM_Evaluate);

}  // namespace

BENCHMARK_MAIN();
