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
#include <set>
#include <string>
#include <vector>

#include "cloudsched/backend.hpp"
#include "cloudsched/clock.hpp"
#include "cloudsched/config.hpp"
#include "cloudsched/domain.hpp"
#include "cloudsched/job_queue.hpp"
#include "cloudsched/trace.hpp"

namespace cloudsched {

/// Per-user fairness bookkeeping, derived from the pool and job pool.
struct Allocation {
    std::map<std::string, std::vector<std::string>> owned;      // user → VM names
    std::map<std::string, std::map<std::string, int>> demand;   // user → vmtype → jobs
};

Allocation compute_allocation(const ResourcePool& pool, const JobPool& jobs);

struct UserDemand {
    std::string user;
    int outstanding = 0;       // live jobs in the pool
    Millis earliest_submit = 0;
};

/// Even distribution of `capacity` VM slots among users with demand:
/// the highest uniform level that fits, targets capped by demand, capacity
/// freed by demand-capped users redistributed, and remaining odd slots
/// handed one each to users in order of earliest outstanding submission.
std::map<std::string, int> fair_share_targets(const std::vector<UserDemand>& users,
                                              int capacity);

struct BootAction {
    std::string cluster;
    VmSpec spec;
    std::string owner;
    std::string job_id;  // marked Scheduled when the boot succeeds; may be empty
};

/// The Scheduler thread's decisions for one cycle, materialized as data.
struct ActionPlan {
    std::vector<BootAction> boots;
    std::vector<std::string> graceful_shutdowns;  // mark draining, stop when idle
    std::vector<std::string> kills;               // immediate shutdown + requeue
    std::vector<std::string> holds;               // job ids
    std::vector<std::string> releases;            // job ids

    bool empty() const {
        return boots.empty() && graceful_shutdowns.empty() && kills.empty() &&
               holds.empty() && releases.empty();
    }
};

/// Everything the scheduler persists: the resource/job pools plus the
/// fairness bookkeeping that must survive a restart.
struct SchedulerState {
    Clock clock = Clock::virtual_clock();
    ResourcePool pool;
    JobPool job_pool;
    std::set<std::string> draining;                      // graceful-drain marks
    std::map<std::string, Millis> drain_marked_at;
    std::map<std::string, std::string> rebalance_holds;  // job id → vmtype guard
    std::map<std::string, Millis> submit_times;          // rebuilt by the poller
};

bool state_equal(const SchedulerState& a, const SchedulerState& b);

struct CycleReport {
    int boots = 0;
    int boot_failures = 0;
    int kills = 0;
    int drains_marked = 0;
    int shutdowns = 0;
    int holds = 0;
    int releases = 0;
    int repairs = 0;
    int requeues = 0;
    std::vector<std::string> errors;
};

enum class ShutdownMode { KillAll, Persist };

struct ShutdownReport {
    int shutdowns = 0;
    std::string snapshot_path;
    std::vector<std::string> errors;
};

/// The Cloud Scheduler proper. Wires the state aggregate to the job queue
/// and the per-cluster backends and runs the three periodic duties
/// (JobPoller, Scheduler, CleanUp). In Virtual-clock mode run_cycle()
/// executes all three as one observable step; the real-clock daemon calls
/// the slice methods from separate threads under one lock.
class SchedulerEngine {
public:
    SchedulerEngine(SchedulerState& state, JobQueue& queue, BackendMap& backends,
                    SchedulerConfig config, TraceFn trace = {});

    /// Maps the queue into the JobPool: unseen live entries appear as New,
    /// dispatched entries are Scheduled, finished entries leave the pool.
    void job_poller();

    /// Polls every VM, applies boot timeouts, reconciles VMs the cloud
    /// has lost (vm_died + pool removal).
    void poll_vms();

    /// Kill every errored VM; plan a same-owner replacement boot when jobs
    /// of its type are still outstanding.
    ActionPlan error_sweep() const;

    /// Fair-share rebalancing: boots for under-allocated users' New jobs,
    /// graceful drains or kills for over-allocated users, holds of pending
    /// jobs of draining vmtypes, releases once the drain is done. `prior`
    /// carries this cycle's error_sweep actions so slot accounting and
    /// ownership counts include them.
    ActionPlan plan(const ActionPlan& prior = {}) const;

    /// Executes a plan: kills, then boots (re-checking fits against live
    /// occupancy), then drain marks, holds and releases.
    CycleReport apply_plan(const ActionPlan& p);

    /// Stops VMs no longer required (idle with no outstanding jobs of their
    /// type, or draining and now idle) and flips Scheduled jobs whose VM is
    /// gone back to New.
    CycleReport cleanup();

    /// The Scheduler thread's slice: poll VMs, then error_sweep + plan +
    /// apply_plan as one unit (the real-clock daemon calls this on its own
    /// interval; job_poller and cleanup run on theirs).
    CycleReport scheduler_pass(std::uint64_t cycle_index = 0);

    /// One deterministic step: poll → job_poller → error_sweep+plan+apply →
    /// cleanup. `cycle_index` keys fault injection and trace records.
    CycleReport run_cycle(std::uint64_t cycle_index = 0);

    /// KillAll stops every managed VM; Persist writes a snapshot to
    /// `persist_path` and leaves VMs running.
    ShutdownReport shutdown(ShutdownMode mode, const std::string& persist_path = {});

    const SchedulerConfig& config() const { return cfg_; }
    SchedulerState& state() { return st_; }

private:
    CycleReport plan_and_apply();
    void repair_requeued(const std::string& job_id, CycleReport& r);
    void emit(const char* kind, const std::string& subject, std::string detail = {});
    void remove_vm_record(const std::string& vm_name);
    bool vm_idle_for_shutdown(const std::string& vm_name) const;
    int outstanding_jobs_of_type(const std::string& vmtype) const;
    std::vector<std::string> pick_shutdown_victims(const std::vector<std::string>& owned,
                                                   int surplus,
                                                   const std::set<std::string>& excluded,
                                                   bool kill_mode) const;
    CycleReport do_shutdown_list(const std::vector<std::string>& vms, const char* reason,
                                 CycleReport report);

    std::vector<UserDemand> current_demands() const;

    SchedulerState& st_;
    JobQueue& queue_;
    BackendMap& backends_;
    SchedulerConfig cfg_;
    TraceFn trace_;
    std::uint64_t cycle_ = 0;

    // Cycle-to-cycle caches: the queue version gates pool re-mapping, the
    // pool epoch tracks VM membership and drain-mark changes.
    std::uint64_t pool_epoch_ = 0;
    std::uint64_t poller_seen_version_ = ~0ULL;
    std::uint64_t cleanup_seen_version_ = ~0ULL;
    std::uint64_t cleanup_seen_epoch_ = ~0ULL;
    mutable bool demands_valid_ = false;
    mutable std::vector<UserDemand> cached_demands_;
};

}  // namespace cloudsched
