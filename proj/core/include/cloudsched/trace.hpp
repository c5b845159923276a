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
#include <functional>
#include <string>

#include "cloudsched/clock.hpp"

namespace cloudsched {

// Event kinds appearing in run traces. Values are stable strings so traces
// are diffable and machine-readable.
namespace trace_kind {
inline constexpr const char* kArrival = "arrival";
inline constexpr const char* kBoot = "boot";
inline constexpr const char* kBootRejected = "boot_rejected";
inline constexpr const char* kVmRunning = "vm_running";
inline constexpr const char* kDispatch = "dispatch";
inline constexpr const char* kComplete = "complete";
inline constexpr const char* kFault = "fault";
inline constexpr const char* kDrainMark = "drain_mark";
inline constexpr const char* kShutdown = "shutdown";
inline constexpr const char* kHold = "hold";
inline constexpr const char* kRelease = "release";
inline constexpr const char* kRequeue = "requeue";
inline constexpr const char* kVmVanished = "vm_vanished";
inline constexpr const char* kSchedRepair = "sched_repair";
inline constexpr const char* kPersist = "persist";
inline constexpr const char* kRestore = "restore";
}  // namespace trace_kind

// Shutdown reasons (detail field of "shutdown" events).
namespace shutdown_reason {
inline constexpr const char* kIdleReap = "idle_reap";
inline constexpr const char* kDrainComplete = "drain_complete";
inline constexpr const char* kDrainTimeout = "drain_timeout";
inline constexpr const char* kError = "error";
inline constexpr const char* kRebalanceKill = "rebalance_kill";
inline constexpr const char* kKillAll = "kill_all";
}  // namespace shutdown_reason

struct TraceEvent {
    Millis time = 0;
    std::uint64_t cycle = 0;
    std::string kind;
    std::string subject;  // VM name or job id
    std::string detail;

    bool operator==(const TraceEvent&) const = default;
};

using TraceFn = std::function<void(const TraceEvent&)>;

std::string format_trace_event(const TraceEvent& e);

}  // namespace cloudsched
