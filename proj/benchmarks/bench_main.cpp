// Copyright 2026 The ASGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "asgn/active.hpp"
#include "asgn/gradsuite.hpp"
#include "asgn/mpgnn.hpp"
#include "asgn/ops.hpp"
#include "asgn/ssl.hpp"

namespace {

using namespace asgn;

BackboneConfig bench_backbone(std::size_t dim) {
  BackboneConfig c;
  c.dim = dim;
  c.layers = 3;
  c.grid.start = 0.0;
  c.grid.stop = 10.0;
  c.grid.step = 0.2;
  c.grid.gamma = 12.5;
  return c;
}

void BM_Forward(benchmark::State& state) {
  const Mpgnn net(bench_backbone(static_cast<std::size_t>(state.range(0))));
  ParameterSet p;
  RngStream rng(1);
  net.init_parameters(p, rng);
  const MolecularGraph g = random_molecule(rng, 18, 5, 5.0);
  ForwardCache cache;
  for (auto _ : state) {
    net.forward(p, g, cache);
    benchmark::DoNotOptimize(cache.prediction.data());
  }
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(64)->Arg(96);

void BM_ForwardBackward(benchmark::State& state) {
  const Mpgnn net(bench_backbone(static_cast<std::size_t>(state.range(0))));
  ParameterSet p;
  RngStream rng(2);
  net.init_parameters(p, rng);
  std::vector<MolecularGraph> mols;
  for (int i = 0; i < 32; ++i) mols.push_back(random_molecule(rng, 18, 5, 5.0));
  std::vector<const MolecularGraph*> batch;
  for (const auto& m : mols) batch.push_back(&m);
  const std::vector<std::vector<double>> targets(batch.size(), std::vector<double>{0.5});
  for (auto _ : state) {
    p.zero_grad();
    benchmark::DoNotOptimize(property_loss(net, p, batch, targets, 1.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(batch.size()));
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_Sinkhorn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  RngStream rng(3);
  Tensor2 z(n, m);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 3.0 * rng.normal();
  const Tensor2 log_q = log_softmax(z);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sinkhorn_solve(log_q, std::vector<double>(n, 1.0 / static_cast<double>(n)),
                                            std::vector<double>(m, 1.0 / static_cast<double>(m)), SinkhornOptions{})
                                 .sweeps);
  }
}
BENCHMARK(BM_Sinkhorn)->Args({500, 10})->Args({2000, 100})->Unit(benchmark::kMillisecond);

void BM_KCenter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(4);
  Tensor2 rows(n, 64);
  std::vector<std::size_t> ids(n), lab, unl;
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = i;
    (i % 10 == 0 ? lab : unl).push_back(i);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = rng.normal();
  const EmbeddingMatrix embs(ids, rows);
  for (auto _ : state) benchmark::DoNotOptimize(k_center_select(embs, lab, unl, 100).ids.data());
}
BENCHMARK(BM_KCenter)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
