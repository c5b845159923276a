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

#include "cloudsched/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "cloudsched/matcher.hpp"
#include "cloudsched/persistence.hpp"

namespace cloudsched {

Allocation compute_allocation(const ResourcePool& pool, const JobPool& jobs) {
    Allocation a;
    for (const auto& c : pool.clusters) {
        for (const auto& vm : c.vms) a.owned[vm.owner].push_back(vm.name);
    }
    auto count = [&](const Job& j) { a.demand[j.user][j.vmtype] += 1; };
    for (const auto& j : jobs.new_list) count(j);
    for (const auto& j : jobs.scheduled_list) count(j);
    return a;
}

std::map<std::string, int> fair_share_targets(const std::vector<UserDemand>& users,
                                              int capacity) {
    std::map<std::string, int> targets;
    for (const auto& u : users) targets[u.user] = 0;
    if (users.empty() || capacity <= 0) return targets;

    const auto used_at = [&](long level) {
        long used = 0;
        for (const auto& u : users) used += std::min<long>(u.outstanding, level);
        return used;
    };

    // Highest uniform level that fits; demand-capped users free the rest.
    long lo = 0, hi = capacity;
    while (lo < hi) {
        long mid = (lo + hi + 1) / 2;
        if (used_at(mid) <= capacity) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    const long level = lo;
    long leftover = capacity - used_at(level);
    for (const auto& u : users) {
        targets[u.user] = static_cast<int>(std::min<long>(u.outstanding, level));
    }

    // Odd slots go one each to uncapped users, earliest submitter first.
    std::vector<const UserDemand*> uncapped;
    for (const auto& u : users) {
        if (u.outstanding > level) uncapped.push_back(&u);
    }
    std::sort(uncapped.begin(), uncapped.end(), [](const UserDemand* a, const UserDemand* b) {
        return std::tie(a->earliest_submit, a->user) < std::tie(b->earliest_submit, b->user);
    });
    for (const UserDemand* u : uncapped) {
        if (leftover <= 0) break;
        targets[u->user] += 1;
        --leftover;
    }
    return targets;
}

bool state_equal(const SchedulerState& a, const SchedulerState& b) {
    return a.clock.mode() == b.clock.mode() && a.clock.now() == b.clock.now() &&
           a.pool == b.pool && a.job_pool == b.job_pool && a.draining == b.draining &&
           a.drain_marked_at == b.drain_marked_at && a.rebalance_holds == b.rebalance_holds &&
           a.submit_times == b.submit_times;
}

SchedulerEngine::SchedulerEngine(SchedulerState& state, JobQueue& queue, BackendMap& backends,
                                 SchedulerConfig config, TraceFn trace)
    : st_(state), queue_(queue), backends_(backends), cfg_(config), trace_(std::move(trace)) {}

void SchedulerEngine::emit(const char* kind, const std::string& subject, std::string detail) {
    if (trace_) trace_({st_.clock.now(), cycle_, kind, subject, std::move(detail)});
}

void SchedulerEngine::job_poller() {
    if (queue_.version() == poller_seen_version_) return;
    poller_seen_version_ = queue_.version();

    std::map<std::string, SchedState> prev;
    for (const auto& j : st_.job_pool.new_list) prev[j.global_job_id] = SchedState::New;
    for (const auto& j : st_.job_pool.scheduled_list) prev[j.global_job_id] = SchedState::Scheduled;

    JobPool next;
    next.new_list.reserve(st_.job_pool.new_list.size() + 16);
    next.scheduled_list.reserve(st_.job_pool.scheduled_list.size() + 16);
    std::map<std::string, Millis> stimes;

    queue_.for_each_entry([&](const QueueEntry& e) {
        if (e.state == QueueState::Completed || e.state == QueueState::Removed) return;
        Job j = e.job;
        j.queue_state = e.state;
        auto it = prev.find(j.global_job_id);
        j.sched_state = it == prev.end() ? SchedState::New : it->second;
        if (e.state == QueueState::Dispatched) j.sched_state = SchedState::Scheduled;
        stimes[j.global_job_id] = e.submit_time;
        auto& list = j.sched_state == SchedState::New ? next.new_list : next.scheduled_list;
        list.push_back(std::move(j));
    });

    st_.job_pool = std::move(next);
    st_.submit_times = std::move(stimes);
    demands_valid_ = false;
}

void SchedulerEngine::poll_vms() {
    const Millis now = st_.clock.now();
    std::vector<std::string> vanished;
    for (auto& cluster : st_.pool.clusters) {
        auto be = backends_.find(cluster.name);
        if (be == backends_.end()) continue;
        auto lost = be->second->poll_all(cluster, now);
        vanished.insert(vanished.end(), lost.begin(), lost.end());
        for (auto& vm : cluster.vms) {
            if (vm.vmstate == VmState::Starting && cfg_.boot_timeout > 0 &&
                now - vm.last_state_change > cfg_.boot_timeout) {
                vm = transition_vm(vm, VmEvent::Fault, now);
                emit(trace_kind::kFault, vm.name, "boot_timeout");
            }
        }
    }
    for (const auto& name : vanished) {
        emit(trace_kind::kVmVanished, name);
        CycleReport scratch;
        for (const auto& rq : queue_.vm_died(name)) {
            emit(trace_kind::kRequeue, rq.job_id, "lost=" + std::to_string(rq.lost_work));
            repair_requeued(rq.job_id, scratch);
        }
        remove_vm_record(name);
    }
}

int SchedulerEngine::outstanding_jobs_of_type(const std::string& vmtype) const {
    int n = 0;
    for (const auto& j : st_.job_pool.new_list)
        if (j.vmtype == vmtype) ++n;
    for (const auto& j : st_.job_pool.scheduled_list)
        if (j.vmtype == vmtype) ++n;
    return n;
}

ActionPlan SchedulerEngine::error_sweep() const {
    ActionPlan out;
    std::map<std::string, int> pending;
    for (const auto& cluster : st_.pool.clusters) {
        for (const auto& vm : cluster.vms) {
            if (vm.vmstate != VmState::Error && vm.error_count < cfg_.error_threshold) continue;
            out.kills.push_back(vm.name);
            pending[cluster.name] -= 1;
            if (outstanding_jobs_of_type(vm.vmtype) == 0) continue;
            // Replacement stays on clouds that consume the same locator kind.
            const ImageLocatorKind kind = image_locator_kind(cluster.cloud_type);
            VmSpec spec = VmSpec::from_record(vm);
            for (const auto& target : st_.pool.clusters) {
                if (image_locator_kind(target.cloud_type) != kind) continue;
                if (!fits_spec(spec, target, pending[target.name])) continue;
                out.boots.push_back({target.name, spec, vm.owner, {}});
                pending[target.name] += 1;
                break;
            }
        }
    }
    return out;
}

bool SchedulerEngine::vm_idle_for_shutdown(const std::string& vm_name) const {
    auto it = queue_.workers().find(vm_name);
    return it == queue_.workers().end() || !it->second.busy;
}

std::vector<std::string> SchedulerEngine::pick_shutdown_victims(
    const std::vector<std::string>& owned, int surplus, const std::set<std::string>& excluded,
    bool kill_mode) const {
    // Per-VM job progress, one pass over the queue.
    std::map<std::string, Millis> elapsed_by_vm;
    queue_.for_each_entry([&](const QueueEntry& e) {
        if (e.state == QueueState::Dispatched) {
            elapsed_by_vm[e.dispatched_to] = e.total_work - e.remaining_work;
        }
    });

    struct Candidate {
        std::string name;
        bool idle;
        Millis age;      // last_state_change, newer = younger
        Millis elapsed;  // progress of the running job
    };
    std::vector<Candidate> cands;
    for (const auto& name : owned) {
        if (excluded.count(name)) continue;
        const VmRecord* vm = st_.pool.find_vm(name);
        if (!vm) continue;
        auto el = elapsed_by_vm.find(name);
        cands.push_back({name, el == elapsed_by_vm.end(), vm->last_state_change,
                         el == elapsed_by_vm.end() ? 0 : el->second});
    }

    // Idle VMs go first (no work is lost). Busy ones: kill mode takes the
    // youngest VM first; graceful drains the longest-running job last.
    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.idle != b.idle) return a.idle;
        if (a.idle) return std::tie(b.age, b.name) < std::tie(a.age, a.name);
        if (kill_mode) return std::tie(b.age, b.name) < std::tie(a.age, a.name);
        return std::tie(a.elapsed, a.name) < std::tie(b.elapsed, b.name);
    });

    std::vector<std::string> victims;
    for (const auto& c : cands) {
        if (static_cast<int>(victims.size()) >= surplus) break;
        victims.push_back(c.name);
    }
    return victims;
}

std::vector<UserDemand> SchedulerEngine::current_demands() const {
    if (demands_valid_) return cached_demands_;
    std::map<std::string, UserDemand> by_user;
    for (const auto* list : {&st_.job_pool.new_list, &st_.job_pool.scheduled_list}) {
        for (const auto& j : *list) {
            UserDemand& u = by_user
                                .try_emplace(j.user, UserDemand{j.user, 0,
                                                                std::numeric_limits<Millis>::max()})
                                .first->second;
            u.outstanding += 1;
            auto it = st_.submit_times.find(j.global_job_id);
            const Millis t = it == st_.submit_times.end() ? 0 : it->second;
            u.earliest_submit = std::min(u.earliest_submit, t);
        }
    }
    cached_demands_.clear();
    for (auto& [user, u] : by_user) cached_demands_.push_back(std::move(u));
    demands_valid_ = true;
    return cached_demands_;
}

ActionPlan SchedulerEngine::plan(const ActionPlan& prior) const {
    ActionPlan out;
    const bool kill_mode = cfg_.rebalance_mode == RebalanceMode::Kill;

    std::set<std::string> prior_kills(prior.kills.begin(), prior.kills.end());
    std::map<std::string, int> pending;  // cluster → planned slot delta
    for (const auto& b : prior.boots) pending[b.cluster] += 1;
    for (const auto& k : prior.kills) {
        for (const auto& c : st_.pool.clusters) {
            if (c.find_vm(k)) {
                pending[c.name] -= 1;
                break;
            }
        }
    }

    std::map<std::string, std::vector<std::string>> owned;
    for (const auto& c : st_.pool.clusters) {
        for (const auto& vm : c.vms) owned[vm.owner].push_back(vm.name);
    }
    const auto targets = fair_share_targets(current_demands(), st_.pool.total_slots());

    // Effective ownership: live VMs minus retiring ones plus planned boots.
    std::map<std::string, int> owned_eff;
    for (const auto& [user, vms] : owned) {
        int n = 0;
        for (const auto& v : vms) {
            if (!st_.draining.count(v) && !prior_kills.count(v)) ++n;
        }
        owned_eff[user] = n;
    }
    for (const auto& b : prior.boots) owned_eff[b.owner] += 1;

    // Under-allocated users: boot for their New jobs, first fitting cluster.
    for (const auto& [user, target] : targets) {
        auto it = owned_eff.find(user);
        int deficit = target - (it == owned_eff.end() ? 0 : it->second);
        if (deficit <= 0) continue;

        std::vector<const Job*> newjobs;
        for (const auto& j : st_.job_pool.new_list) {
            if (j.user == user) newjobs.push_back(&j);
        }
        std::sort(newjobs.begin(), newjobs.end(), [&](const Job* a, const Job* b) {
            auto ta = st_.submit_times.find(a->global_job_id);
            auto tb = st_.submit_times.find(b->global_job_id);
            Millis sa = ta == st_.submit_times.end() ? 0 : ta->second;
            Millis sb = tb == st_.submit_times.end() ? 0 : tb->second;
            if (sa != sb) return sa < sb;
            return job_id_less(a->global_job_id, b->global_job_id);
        });

        for (const Job* j : newjobs) {
            if (deficit <= 0) break;
            for (const auto& cluster : st_.pool.clusters) {
                if (!fits(*j, cluster, pending[cluster.name])) continue;
                out.boots.push_back({cluster.name, VmSpec::from_job(*j, cluster.cloud_type),
                                     user, j->global_job_id});
                pending[cluster.name] += 1;
                --deficit;
                break;
            }
        }
    }

    // Over-allocated users: retire the surplus. Owners with no live jobs
    // are cleanup's business (idle reap), not rebalancing's.
    std::set<std::string> excluded = st_.draining;
    excluded.insert(prior_kills.begin(), prior_kills.end());
    for (const auto& [user, vms] : owned) {
        auto t = targets.find(user);
        if (t == targets.end()) continue;
        const int target = t->second;
        auto oe = owned_eff.find(user);
        const int surplus = (oe == owned_eff.end() ? 0 : oe->second) - target;
        if (surplus <= 0) continue;
        auto victims = pick_shutdown_victims(vms, surplus, excluded, kill_mode);
        auto& sink = kill_mode ? out.kills : out.graceful_shutdowns;
        sink.insert(sink.end(), victims.begin(), victims.end());
    }

    // Hold pending jobs that could be dispatched onto draining VMs.
    std::set<std::string> draining_types;
    for (const auto& name : st_.draining) {
        if (const VmRecord* vm = st_.pool.find_vm(name)) draining_types.insert(vm->vmtype);
    }
    for (const auto& name : out.graceful_shutdowns) {
        if (const VmRecord* vm = st_.pool.find_vm(name)) draining_types.insert(vm->vmtype);
    }
    if (!draining_types.empty()) {
        for (const auto* list : {&st_.job_pool.new_list, &st_.job_pool.scheduled_list}) {
            for (const auto& j : *list) {
                if (j.queue_state == QueueState::Queued && draining_types.count(j.vmtype) &&
                    !st_.rebalance_holds.count(j.global_job_id)) {
                    out.holds.push_back(j.global_job_id);
                }
            }
        }
    }

    // Release once no VM of the guarded type is draining any more.
    for (const auto& [job_id, vmtype] : st_.rebalance_holds) {
        if (!draining_types.count(vmtype)) out.releases.push_back(job_id);
    }
    return out;
}

// A requeued job's VM is gone: its resources are no longer arranged, so
// the pool mark goes back to New and a new VM can be created for it.
void SchedulerEngine::repair_requeued(const std::string& job_id, CycleReport& r) {
    auto& sl = st_.job_pool.scheduled_list;
    auto it = std::find_if(sl.begin(), sl.end(),
                           [&](const Job& j) { return j.global_job_id == job_id; });
    if (it == sl.end()) return;
    Job j = std::move(*it);
    sl.erase(it);
    j.sched_state = SchedState::New;
    j.queue_state = QueueState::Queued;
    st_.job_pool.new_list.push_back(std::move(j));
    emit(trace_kind::kSchedRepair, job_id);
    ++r.repairs;
}

void SchedulerEngine::remove_vm_record(const std::string& vm_name) {
    for (auto& cluster : st_.pool.clusters) {
        std::erase_if(cluster.vms, [&](const VmRecord& v) { return v.name == vm_name; });
    }
    st_.draining.erase(vm_name);
    st_.drain_marked_at.erase(vm_name);
    ++pool_epoch_;
}

CycleReport SchedulerEngine::apply_plan(const ActionPlan& p) {
    CycleReport r;
    const Millis now = st_.clock.now();

    for (const auto& name : p.kills) {
        Cluster* cluster = nullptr;
        for (auto& c : st_.pool.clusters) {
            if (c.find_vm(name)) {
                cluster = &c;
                break;
            }
        }
        if (!cluster) continue;
        const VmRecord* record = cluster->find_vm(name);
        const bool errored = record->vmstate == VmState::Error;
        const std::string vmtype = record->vmtype;
        auto be = backends_.find(cluster->name);
        if (be == backends_.end()) {
            r.errors.push_back("no backend for cluster " + cluster->name);
            continue;
        }
        const auto running_job = queue_.dispatched_job_on(name);
        try {
            be->second->shutdown(*cluster, name);
        } catch (const std::exception& ex) {
            r.errors.push_back(name + std::string(": ") + ex.what());
            continue;
        }
        st_.draining.erase(name);
        st_.drain_marked_at.erase(name);
        ++pool_epoch_;
        emit(trace_kind::kShutdown, name,
             std::string("reason=") +
                 (errored ? shutdown_reason::kError : shutdown_reason::kRebalanceKill) +
                 " dispatched=" + (running_job ? "1" : "0") + " vmtype=" + vmtype);
        ++r.kills;
        for (const auto& rq : queue_.vm_died(name)) {
            emit(trace_kind::kRequeue, rq.job_id, "lost=" + std::to_string(rq.lost_work));
            ++r.requeues;
            repair_requeued(rq.job_id, r);
        }
    }

    for (const auto& b : p.boots) {
        Cluster* cluster = st_.pool.find(b.cluster);
        if (!cluster) {
            r.errors.push_back("boot: unknown cluster " + b.cluster);
            continue;
        }
        auto be = backends_.find(b.cluster);
        if (be == backends_.end()) {
            ++r.boot_failures;
            emit(trace_kind::kBootRejected, b.spec.vmtype,
                 "cluster=" + b.cluster + " reason=no_backend");
            continue;
        }
        // The plan may be stale by one action; never boot past vm_slots.
        if (!fits_spec(b.spec, *cluster)) {
            ++r.boot_failures;
            emit(trace_kind::kBootRejected, b.spec.vmtype,
                 "cluster=" + b.cluster + " reason=no_longer_fits");
            continue;
        }
        try {
            be->second->boot(*cluster, b.spec, now);
        } catch (const BootRejected& ex) {
            ++r.boot_failures;
            emit(trace_kind::kBootRejected, b.spec.vmtype,
                 "cluster=" + b.cluster + " reason=" + ex.what());
            continue;
        }
        ++pool_epoch_;
        const VmRecord& vm = cluster->vms.back();
        emit(trace_kind::kBoot, vm.name,
             "cluster=" + b.cluster + " vmtype=" + vm.vmtype + " owner=" + vm.owner +
                 (b.job_id.empty() ? "" : " job=" + b.job_id));
        ++r.boots;

        if (!b.job_id.empty()) {
            auto it = std::find_if(
                st_.job_pool.new_list.begin(), st_.job_pool.new_list.end(),
                [&](const Job& j) { return j.global_job_id == b.job_id; });
            if (it != st_.job_pool.new_list.end()) {
                Job j = std::move(*it);
                st_.job_pool.new_list.erase(it);
                j.sched_state = SchedState::Scheduled;
                st_.job_pool.scheduled_list.push_back(std::move(j));
            }
        }
    }

    for (const auto& name : p.graceful_shutdowns) {
        if (!st_.pool.find_vm(name) || st_.draining.count(name)) continue;
        st_.draining.insert(name);
        st_.drain_marked_at[name] = now;
        ++pool_epoch_;
        emit(trace_kind::kDrainMark, name);
        ++r.drains_marked;
    }

    for (const auto& job_id : p.holds) {
        const Job* j = st_.job_pool.find(job_id);
        if (!j) continue;
        try {
            queue_.hold(job_id, "rebalance");
        } catch (const WrongState&) {
            continue;  // dispatched or finished in the meantime
        }
        st_.rebalance_holds[job_id] = j->vmtype;
        emit(trace_kind::kHold, job_id, "vmtype=" + j->vmtype);
        ++r.holds;
    }

    for (const auto& job_id : p.releases) {
        try {
            queue_.release(job_id);
        } catch (const WrongState&) {
            // completed or requeued while held-bookkeeping lagged; forget it
        }
        st_.rebalance_holds.erase(job_id);
        emit(trace_kind::kRelease, job_id);
        ++r.releases;
    }
    return r;
}

CycleReport SchedulerEngine::do_shutdown_list(const std::vector<std::string>& vms,
                                              const char* reason, CycleReport r) {
    for (const auto& name : vms) {
        Cluster* cluster = nullptr;
        for (auto& c : st_.pool.clusters) {
            if (c.find_vm(name)) {
                cluster = &c;
                break;
            }
        }
        if (!cluster) continue;
        const std::string vmtype = cluster->find_vm(name)->vmtype;
        auto be = backends_.find(cluster->name);
        if (be == backends_.end()) {
            r.errors.push_back("no backend for cluster " + cluster->name);
            continue;
        }
        const auto running_job = queue_.dispatched_job_on(name);
        try {
            be->second->shutdown(*cluster, name);
        } catch (const std::exception& ex) {
            r.errors.push_back(name + std::string(": ") + ex.what());
            continue;
        }
        st_.draining.erase(name);
        st_.drain_marked_at.erase(name);
        ++pool_epoch_;
        emit(trace_kind::kShutdown, name,
             std::string("reason=") + reason + " dispatched=" + (running_job ? "1" : "0") +
                 " vmtype=" + vmtype);
        ++r.shutdowns;
        for (const auto& rq : queue_.vm_died(name)) {
            emit(trace_kind::kRequeue, rq.job_id, "lost=" + std::to_string(rq.lost_work));
            ++r.requeues;
            repair_requeued(rq.job_id, r);
        }
    }
    return r;
}

CycleReport SchedulerEngine::cleanup() {
    CycleReport r;
    const Millis now = st_.clock.now();

    // Drain timeouts are purely time-based, so they are checked every pass.
    std::vector<std::string> stop_timeout;
    if (cfg_.drain_timeout) {
        for (const auto& name : st_.draining) {
            auto it = st_.drain_marked_at.find(name);
            if (it != st_.drain_marked_at.end() && now - it->second >= *cfg_.drain_timeout &&
                !vm_idle_for_shutdown(name)) {
                stop_timeout.push_back(name);
            }
        }
    }
    r = do_shutdown_list(stop_timeout, shutdown_reason::kDrainTimeout, std::move(r));

    // Idleness and demand only move when the queue or the VM set does.
    if (queue_.version() == cleanup_seen_version_ && pool_epoch_ == cleanup_seen_epoch_) {
        return r;
    }

    std::map<std::string, int> outstanding_by_type;
    for (const auto* list : {&st_.job_pool.new_list, &st_.job_pool.scheduled_list}) {
        for (const auto& j : *list) outstanding_by_type[j.vmtype] += 1;
    }

    std::vector<std::string> stop_idle, stop_drained;
    for (const auto& cluster : st_.pool.clusters) {
        for (const auto& vm : cluster.vms) {
            if (!vm_idle_for_shutdown(vm.name)) continue;
            if (st_.draining.count(vm.name)) {
                stop_drained.push_back(vm.name);
            } else if (outstanding_by_type.find(vm.vmtype) == outstanding_by_type.end()) {
                stop_idle.push_back(vm.name);
            }
        }
    }
    r = do_shutdown_list(stop_drained, shutdown_reason::kDrainComplete, std::move(r));
    r = do_shutdown_list(stop_idle, shutdown_reason::kIdleReap, std::move(r));
    cleanup_seen_version_ = queue_.version();
    cleanup_seen_epoch_ = pool_epoch_;

    // Scheduled jobs whose VMs are gone flip back to New so new VMs can be
    // created. Balance per vmtype: waiting Scheduled jobs beyond the
    // idle+starting capacity of live, non-draining VMs lose their mark,
    // newest submissions first.
    std::map<std::string, int> live_vms, dispatched;
    for (const auto& cluster : st_.pool.clusters) {
        for (const auto& vm : cluster.vms) {
            if (vm.vmstate != VmState::Error && !st_.draining.count(vm.name)) {
                live_vms[vm.vmtype] += 1;
            }
        }
    }
    queue_.for_each_entry([&](const QueueEntry& e) {
        if (e.state == QueueState::Dispatched) dispatched[e.job.vmtype] += 1;
    });

    std::map<std::string, std::vector<Job*>> waiting;  // Scheduled but not running
    for (auto& j : st_.job_pool.scheduled_list) {
        const QueueEntry* e = queue_.find(j.global_job_id);
        if (!e) continue;
        if (e->state == QueueState::Queued || e->state == QueueState::Held) {
            waiting[j.vmtype].push_back(&j);
        }
    }
    std::vector<std::string> repaired;
    for (auto& [vmtype, jobs] : waiting) {
        const int capacity = std::max(0, live_vms[vmtype] - dispatched[vmtype]);
        int excess = static_cast<int>(jobs.size()) - capacity;
        if (excess <= 0) continue;
        std::sort(jobs.begin(), jobs.end(), [&](const Job* a, const Job* b) {
            auto ta = st_.submit_times.find(a->global_job_id);
            auto tb = st_.submit_times.find(b->global_job_id);
            Millis sa = ta == st_.submit_times.end() ? 0 : ta->second;
            Millis sb = tb == st_.submit_times.end() ? 0 : tb->second;
            if (sa != sb) return sa > sb;  // newest first
            return job_id_less(b->global_job_id, a->global_job_id);
        });
        for (int i = 0; i < excess; ++i) {
            jobs[static_cast<std::size_t>(i)]->sched_state = SchedState::New;
            repaired.push_back(jobs[static_cast<std::size_t>(i)]->global_job_id);
        }
    }
    if (!repaired.empty()) {
        std::set<std::string> moved(repaired.begin(), repaired.end());
        auto& sl = st_.job_pool.scheduled_list;
        for (auto it = sl.begin(); it != sl.end();) {
            if (moved.count(it->global_job_id)) {
                emit(trace_kind::kSchedRepair, it->global_job_id);
                ++r.repairs;
                st_.job_pool.new_list.push_back(std::move(*it));
                it = sl.erase(it);
            } else {
                ++it;
            }
        }
    }
    return r;
}

namespace {
CycleReport merge_reports(CycleReport a, const CycleReport& b) {
    a.boots += b.boots;
    a.boot_failures += b.boot_failures;
    a.kills += b.kills;
    a.drains_marked += b.drains_marked;
    a.shutdowns += b.shutdowns;
    a.holds += b.holds;
    a.releases += b.releases;
    a.repairs += b.repairs;
    a.requeues += b.requeues;
    a.errors.insert(a.errors.end(), b.errors.begin(), b.errors.end());
    return a;
}
}  // namespace

CycleReport SchedulerEngine::plan_and_apply() {
    ActionPlan merged = error_sweep();
    ActionPlan fair = plan(merged);
    merged.boots.insert(merged.boots.end(), fair.boots.begin(), fair.boots.end());
    merged.kills.insert(merged.kills.end(), fair.kills.begin(), fair.kills.end());
    merged.graceful_shutdowns = std::move(fair.graceful_shutdowns);
    merged.holds = std::move(fair.holds);
    merged.releases = std::move(fair.releases);
    return apply_plan(merged);
}

CycleReport SchedulerEngine::scheduler_pass(std::uint64_t cycle_index) {
    cycle_ = cycle_index;
    poll_vms();
    return plan_and_apply();
}

CycleReport SchedulerEngine::run_cycle(std::uint64_t cycle_index) {
    cycle_ = cycle_index;
    poll_vms();
    job_poller();

    CycleReport r = plan_and_apply();
    r = merge_reports(std::move(r), cleanup());

    for (const auto& c : st_.pool.clusters) {
        if (static_cast<int>(c.vms.size()) > c.vm_slots) {
            throw Error("capacity invariant violated on cluster " + c.name);
        }
    }
    return r;
}

ShutdownReport SchedulerEngine::shutdown(ShutdownMode mode, const std::string& persist_path) {
    ShutdownReport report;
    if (mode == ShutdownMode::Persist) {
        save_snapshot_file(st_, persist_path);
        emit(trace_kind::kPersist, persist_path);
        report.snapshot_path = persist_path;
        return report;
    }

    std::vector<std::string> all;
    for (const auto& c : st_.pool.clusters) {
        for (const auto& vm : c.vms) all.push_back(vm.name);
    }
    CycleReport r = do_shutdown_list(all, shutdown_reason::kKillAll, {});
    report.shutdowns = r.shutdowns;
    report.errors = std::move(r.errors);

    for (const auto& [job_id, vmtype] : st_.rebalance_holds) {
        try {
            queue_.release(job_id);
        } catch (const WrongState&) {
        }
    }
    st_.rebalance_holds.clear();
    st_.draining.clear();
    st_.drain_marked_at.clear();
    return report;
}

}  // namespace cloudsched
