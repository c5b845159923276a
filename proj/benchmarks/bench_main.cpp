// Copyright 2026 The Cloudsched Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "cloudsched/harness.hpp"
#include "cloudsched/job_queue.hpp"
#include "cloudsched/persistence.hpp"
#include "cloudsched/scheduler.hpp"
#include "cloudsched/submit.hpp"
#include "support/builders.hpp"

using namespace cloudsched;

namespace {

std::vector<Job> make_jobs(int n, const std::string& vmtype) {
    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        jobs.push_back(test::make_job(std::to_string(i + 1) + ".0", "u", vmtype));
    }
    return jobs;
}

void BM_DispatchCycle(benchmark::State& state) {
    const int jobs = static_cast<int>(state.range(0));
    const int vms = static_cast<int>(state.range(1));
    for (auto _ : state) {
        state.PauseTiming();
        JobQueue q;
        q.submit(make_jobs(jobs, "w"), std::vector<Millis>(static_cast<std::size_t>(jobs), 1000),
                 0);
        for (int v = 0; v < vms; ++v) q.advertise({"v" + std::to_string(v), "w", false, 0});
        state.ResumeTiming();
        benchmark::DoNotOptimize(q.dispatch_cycle());
    }
    state.SetItemsProcessed(state.iterations() * vms);
}
BENCHMARK(BM_DispatchCycle)->Args({2000, 80})->Args({9000, 232})->Args({100, 8});

void BM_FairShareTargets(benchmark::State& state) {
    const int users = static_cast<int>(state.range(0));
    std::vector<UserDemand> demand;
    for (int u = 0; u < users; ++u) {
        demand.push_back({"user" + std::to_string(u), 50 + u, static_cast<Millis>(u)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fair_share_targets(demand, 256));
    }
}
BENCHMARK(BM_FairShareTargets)->Arg(2)->Arg(8)->Arg(64);

void BM_ParseSubmit(benchmark::State& state) {
    const std::string script =
        "Universe = vanilla\nExecutable = run.sh\n+VMType = \"worker\"\n"
        "+VMLoc = \"http://repo.cloud/worker.img.gz\"\n+VMCPUArch = \"x86\"\n"
        "+VMMem = \"512\"\n+VMStorage = \"20\"\nQueue 4\n";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_submit(script));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(script.size()));
}
BENCHMARK(BM_ParseSubmit);

void BM_SchedulerCycle(benchmark::State& state) {
    const int slots = static_cast<int>(state.range(0));
    for (auto _ : state) {
        state.PauseTiming();
        SchedulerState st;
        st.clock = Clock::virtual_clock();
        st.pool.clusters.push_back(test::make_cluster("c", slots));
        JobQueue q;
        BackendMap backends;
        backends["c"] = std::make_unique<SimCloudBackend>("c", SimCloudConfig{});
        q.submit(make_jobs(slots * 4, "w"),
                 std::vector<Millis>(static_cast<std::size_t>(slots) * 4, 60'000), 0);
        SchedulerEngine engine(st, q, backends, SchedulerConfig{});
        state.ResumeTiming();
        benchmark::DoNotOptimize(engine.run_cycle(0));
    }
}
BENCHMARK(BM_SchedulerCycle)->Arg(20)->Arg(80)->Arg(232);

void BM_SnapshotRestore(benchmark::State& state) {
    SchedulerState st;
    st.clock = Clock::virtual_clock(1000);
    Cluster c = test::make_cluster("c", 256);
    for (int i = 0; i < 200; ++i) {
        c.vms.push_back(test::make_vm("c-vm-" + std::to_string(i), "w", "u", c.host));
    }
    st.pool.clusters.push_back(std::move(c));
    for (const auto& j : make_jobs(1000, "w")) st.job_pool.new_list.push_back(j);
    for (auto _ : state) {
        benchmark::DoNotOptimize(restore(snapshot(st)));
    }
}
BENCHMARK(BM_SnapshotRestore);

void BM_RunScenario(benchmark::State& state) {
    Scenario s = test::make_scenario(/*slots=*/8, /*jobs=*/64, 10 * kMillisPerMinute,
                                     /*boot_latency=*/60'000, /*seed=*/3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(s));
    }
}
BENCHMARK(BM_RunScenario);

}  // namespace

BENCHMARK_MAIN();
