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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cloudsched/config.hpp"
#include "cloudsched/domain.hpp"

namespace cloudsched {

/// One batch of jobs entering the queue at a virtual time. The VM
/// requirements come either from a submit file or from inline attributes.
struct Arrival {
    Millis time = 0;
    std::string user;
    int count = 1;              // total jobs = count × descriptor queue_count
    Millis duration = 0;        // simulated execution time per job
    std::string submit_file;    // path, resolved relative to the scenario file
    std::string submit_text;    // inline alternative (already loaded)
};

/// Scripted fault. The selector picks a VM on the cluster at fire time:
/// "any" (first live), "index:N" (Nth live, name order) or "name:X".
struct FaultScript {
    Millis time = 0;
    std::string cluster;
    std::string selector = "any";
};

struct Scenario {
    std::vector<CloudDecl> clouds;
    std::vector<Arrival> arrivals;      // sorted by time
    std::vector<FaultScript> faults;    // sorted by time
    Millis horizon = 0;
    Millis cycle_period = 60 * kMillisPerSecond;
    std::uint64_t seed = 0;
    SchedulerConfig scheduler;
};

/// Parses a scenario file ([scenario] / [scheduler] / [cluster N] /
/// [arrival] / [fault] sections). Throws ScenarioError.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& path);

}  // namespace cloudsched
