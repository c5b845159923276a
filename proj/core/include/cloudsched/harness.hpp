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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cloudsched/scenario.hpp"
#include "cloudsched/trace.hpp"

namespace cloudsched {

struct CycleSample {
    std::uint64_t cycle = 0;
    Millis time = 0;
    std::map<std::string, int> vms_per_user;
    std::map<std::string, int> live_jobs_per_user;
    int total_vms = 0;
    int dispatched = 0;

    bool operator==(const CycleSample&) const = default;
};

struct Metrics {
    long jobs_submitted = 0;
    long jobs_completed = 0;
    Millis makespan = 0;        // virtual time of the last completion
    double core_hours = 0.0;    // over completed jobs
    long boots = 0;
    long boot_rejections = 0;
    long kills = 0;             // error, rebalance-kill, drain-timeout, kill-all
    long graceful_shutdowns = 0;
    long idle_reaps = 0;
    long requeues = 0;
    long holds = 0;
    long releases = 0;
    long repairs = 0;
    long faults = 0;
    Millis wasted_work = 0;     // progress thrown away by kills
    std::vector<CycleSample> timeseries;

    bool operator==(const Metrics&) const = default;
};

struct RunResult {
    Metrics metrics;
    std::vector<TraceEvent> trace;
};

/// Interrupt the run at the start of `at_cycle`: persist to `snapshot_path`
/// (a temp path when empty), tear the scheduler state down and restore it
/// from the file. The queue and the simulated clouds keep running, like the
/// real Condor and IaaS services would across a scheduler restart.
struct RestartSpec {
    std::uint64_t at_cycle = 0;
    std::string snapshot_path;
};

/// Deterministic scenario execution on the virtual clock. Advances in
/// cycle_period steps; each step delivers cloud events, applies arrivals and
/// faults, runs one scheduler cycle, dispatches and advances queue work.
/// Stops at the horizon or at quiescence. Work conservation, per-cluster
/// capacity and shutdown safety are asserted every cycle (Error on
/// violation). Identical scenarios produce bit-identical results.
RunResult run_scenario(const Scenario& s,
                       const std::optional<RestartSpec>& restart = std::nullopt);

struct TraceDivergence {
    std::size_t index = 0;
    std::optional<TraceEvent> a;  // nullopt when one trace is a prefix
    std::optional<TraceEvent> b;
};

/// First differing event between two traces, or nullopt when equal.
std::optional<TraceDivergence> compare_runs(const std::vector<TraceEvent>& a,
                                            const std::vector<TraceEvent>& b);

/// Copy of the trace without the given kind (persist/restore markers are
/// stripped before restart-transparency comparison).
std::vector<TraceEvent> filter_trace(const std::vector<TraceEvent>& trace,
                                     const std::string& drop_kind);

/// Writes report.txt, metrics.json, timeseries.csv and trace.jsonl.
void write_reports(const RunResult& rr, const std::string& outdir);

std::string render_metrics_text(const Metrics& m);

}  // namespace cloudsched
