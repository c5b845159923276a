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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cloudsched/clock.hpp"
#include "cloudsched/domain.hpp"

namespace cloudsched {

/// One queue entry. `remaining_work` is the simulated execution payload;
/// requeueing after a VM death restores it to `total_work`.
struct QueueEntry {
    Job job;
    QueueState state = QueueState::Queued;
    std::string dispatched_to;   // VM name, non-empty iff Dispatched
    Millis total_work = 0;
    Millis remaining_work = 0;
    Millis submit_time = 0;
    std::string hold_reason;     // internal only
    std::uint64_t seq = 0;       // submission order, tie-break
};

/// A booted VM that has advertised itself as an execution slot.
struct WorkerAd {
    std::string vm_name;
    std::string vmtype;
    bool busy = false;
    Millis registered_at = 0;

    bool operator==(const WorkerAd&) const = default;
};

struct DispatchPair {
    std::string job_id;
    std::string vm_name;
    bool operator==(const DispatchPair&) const = default;
};

struct RequeuedJob {
    std::string job_id;
    Millis lost_work = 0;  // progress discarded by the kill
};

/// Orders "cluster.proc" ids numerically, other ids lexicographically.
bool job_id_less(const std::string& a, const std::string& b);

/// Embedded stand-in for the Condor central manager: holds the queue,
/// accepts VM advertisements, dispatches jobs to idle VMs by VMType, and
/// implements hold/release and requeue-on-death. Matchmaking is on the
/// VMType attribute only; per-job selection is priority descending, then
/// submit time, then job id.
class JobQueue {
public:
    /// Appends jobs as Queued. `durations` is the simulated execution time
    /// per job and must align with `jobs`. Throws DuplicateJobId.
    std::vector<std::string> submit(const std::vector<Job>& jobs,
                                    const std::vector<Millis>& durations, Millis now);

    /// Registers (or refreshes) an execution slot. Idempotent.
    void advertise(const WorkerAd& ad);

    /// Matches idle advertised VMs with Queued jobs of the same vmtype.
    /// At most one job per VM per cycle. Deterministic: VMs are served in
    /// name order, each taking its best eligible job.
    std::vector<DispatchPair> dispatch_cycle();

    /// hold: Queued→Held (invisible to dispatch). release: Held→Queued.
    /// Throws WrongState on anything else (including unknown ids).
    void hold(const std::string& job_id, const std::string& reason = {});
    void release(const std::string& job_id);

    /// Removes the worker; a job dispatched there is requeued with its full
    /// duration restored. Unknown VM names are a no-op.
    std::vector<RequeuedJob> vm_died(const std::string& vm_name);

    /// Advances every Dispatched entry by dt; entries reaching zero become
    /// Completed and their VM falls idle. Returns completed ids in order.
    std::vector<std::string> advance_work(Millis dt);

    /// Read-only consistent view (job.queue_state mirrors the entry state).
    std::vector<std::pair<Job, QueueState>> snapshot() const;

    // Module-level accessors used by the scheduler loops and the CLI.
    void for_each_entry(const std::function<void(const QueueEntry&)>& fn) const;
    const std::map<std::string, WorkerAd>& workers() const { return workers_; }
    std::optional<std::string> dispatched_job_on(const std::string& vm_name) const;
    bool vm_idle(const std::string& vm_name) const;
    std::size_t live_job_count() const;
    const QueueEntry* find(const std::string& job_id) const;

    /// Total execution time delivered to dispatched entries so far
    /// (feeds the work conservation checks).
    Millis total_work_performed() const { return work_performed_; }

    /// Bumped on every membership or state change (not on plain work
    /// countdown), so pollers can skip re-mapping an unchanged queue.
    std::uint64_t version() const { return version_; }

private:
    QueueEntry& entry_or_throw(const std::string& job_id);

    std::map<std::string, QueueEntry, decltype(&job_id_less)> entries_{&job_id_less};
    std::map<std::string, WorkerAd> workers_;
    std::vector<QueueEntry*> running_;  // Dispatched entries (map nodes are stable)
    std::uint64_t next_seq_ = 0;
    std::uint64_t version_ = 0;
    Millis work_performed_ = 0;
};

}  // namespace cloudsched
