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

#include "cloudsched/job_queue.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "cloudsched/errors.hpp"

namespace cloudsched {

bool job_id_less(const std::string& a, const std::string& b) {
    auto split = [](const std::string& s, long long& cl, long long& proc) {
        auto dot = s.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 >= s.size()) return false;
        auto digits = [](const std::string& t) {
            return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) {
                return std::isdigit(c);
            });
        };
        std::string c = s.substr(0, dot), p = s.substr(dot + 1);
        if (!digits(c) || !digits(p) || c.size() > 18 || p.size() > 18) return false;
        cl = std::stoll(c);
        proc = std::stoll(p);
        return true;
    };
    long long ac, ap, bc, bp;
    const bool an = split(a, ac, ap), bn = split(b, bc, bp);
    if (an && bn) return std::tie(ac, ap) < std::tie(bc, bp);
    if (an != bn) return an;  // numeric ids sort before free-form ids
    return a < b;
}

std::vector<std::string> JobQueue::submit(const std::vector<Job>& jobs,
                                          const std::vector<Millis>& durations,
                                          Millis now) {
    if (jobs.size() != durations.size()) {
        throw Error("submit: jobs and durations are not aligned");
    }
    for (const auto& j : jobs) {
        if (entries_.count(j.global_job_id)) throw DuplicateJobId(j.global_job_id);
    }
    std::vector<std::string> ids;
    ids.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        QueueEntry e;
        e.job = jobs[i];
        e.job.queue_state = QueueState::Queued;
        e.state = QueueState::Queued;
        e.total_work = durations[i];
        e.remaining_work = durations[i];
        e.submit_time = now;
        e.seq = next_seq_++;
        ids.push_back(e.job.global_job_id);
        entries_.emplace(e.job.global_job_id, std::move(e));
    }
    if (!jobs.empty()) ++version_;
    return ids;
}

void JobQueue::advertise(const WorkerAd& ad) {
    auto it = workers_.find(ad.vm_name);
    if (it == workers_.end()) {
        workers_[ad.vm_name] = ad;
    } else {
        // Refresh; busy reflects queue state, not the advertisement.
        it->second.vmtype = ad.vmtype;
        it->second.registered_at = ad.registered_at;
    }
}

std::vector<DispatchPair> JobQueue::dispatch_cycle() {
    std::set<std::string> idle_types;
    for (const auto& [vm_name, worker] : workers_) {
        if (!worker.busy) idle_types.insert(worker.vmtype);
    }
    if (idle_types.empty()) return {};

    // entries_ iterates in job-id order, so a stable sort on
    // (priority desc, submit_time asc) leaves id as the final tie-break.
    std::map<std::string, std::vector<QueueEntry*>> queued_by_type;
    for (auto& [id, e] : entries_) {
        if (e.state == QueueState::Queued && idle_types.count(e.job.vmtype)) {
            queued_by_type[e.job.vmtype].push_back(&e);
        }
    }
    for (auto& [type, vec] : queued_by_type) {
        std::stable_sort(vec.begin(), vec.end(), [](const QueueEntry* a, const QueueEntry* b) {
            return std::make_pair(-a->job.priority, a->submit_time) <
                   std::make_pair(-b->job.priority, b->submit_time);
        });
    }

    std::map<std::string, std::size_t> cursor;
    std::vector<DispatchPair> dispatched;
    for (auto& [vm_name, worker] : workers_) {
        if (worker.busy) continue;
        auto it = queued_by_type.find(worker.vmtype);
        if (it == queued_by_type.end()) continue;
        std::size_t& i = cursor[worker.vmtype];
        if (i >= it->second.size()) continue;
        QueueEntry* best = it->second[i++];
        best->state = QueueState::Dispatched;
        best->job.queue_state = QueueState::Dispatched;
        best->dispatched_to = vm_name;
        worker.busy = true;
        running_.push_back(best);
        dispatched.push_back({best->job.global_job_id, vm_name});
    }
    if (!dispatched.empty()) ++version_;
    return dispatched;
}

QueueEntry& JobQueue::entry_or_throw(const std::string& job_id) {
    auto it = entries_.find(job_id);
    if (it == entries_.end()) throw WrongState("no such job: " + job_id);
    return it->second;
}

void JobQueue::hold(const std::string& job_id, const std::string& reason) {
    QueueEntry& e = entry_or_throw(job_id);
    if (e.state != QueueState::Queued) {
        throw WrongState("hold: job " + job_id + " is " + to_string(e.state));
    }
    e.state = QueueState::Held;
    e.job.queue_state = QueueState::Held;
    e.hold_reason = reason;
    ++version_;
}

void JobQueue::release(const std::string& job_id) {
    QueueEntry& e = entry_or_throw(job_id);
    if (e.state != QueueState::Held) {
        throw WrongState("release: job " + job_id + " is " + to_string(e.state));
    }
    e.state = QueueState::Queued;
    e.job.queue_state = QueueState::Queued;
    e.hold_reason.clear();
    ++version_;
}

std::vector<RequeuedJob> JobQueue::vm_died(const std::string& vm_name) {
    std::vector<RequeuedJob> requeued;
    workers_.erase(vm_name);
    std::erase_if(running_, [&](QueueEntry* e) {
        if (e->dispatched_to != vm_name) return false;
        requeued.push_back({e->job.global_job_id, e->total_work - e->remaining_work});
        e->state = QueueState::Queued;
        e->job.queue_state = QueueState::Queued;
        e->dispatched_to.clear();
        e->remaining_work = e->total_work;  // restart from scratch
        return true;
    });
    if (!requeued.empty()) ++version_;
    return requeued;
}

std::vector<std::string> JobQueue::advance_work(Millis dt) {
    if (dt < 0) throw Error("advance_work: negative dt");
    std::vector<std::string> completed;
    std::erase_if(running_, [&](QueueEntry* e) {
        work_performed_ += std::min(dt, e->remaining_work);
        e->remaining_work = std::max<Millis>(0, e->remaining_work - dt);
        if (e->remaining_work != 0) return false;
        e->state = QueueState::Completed;
        e->job.queue_state = QueueState::Completed;
        auto w = workers_.find(e->dispatched_to);
        if (w != workers_.end()) w->second.busy = false;
        e->dispatched_to.clear();
        completed.push_back(e->job.global_job_id);
        return true;
    });
    std::sort(completed.begin(), completed.end(), &job_id_less);
    if (!completed.empty()) ++version_;
    return completed;
}

std::vector<std::pair<Job, QueueState>> JobQueue::snapshot() const {
    std::vector<std::pair<Job, QueueState>> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_) out.emplace_back(e.job, e.state);
    return out;
}

void JobQueue::for_each_entry(const std::function<void(const QueueEntry&)>& fn) const {
    for (const auto& [id, e] : entries_) fn(e);
}

std::optional<std::string> JobQueue::dispatched_job_on(const std::string& vm_name) const {
    for (const auto& [id, e] : entries_) {
        if (e.state == QueueState::Dispatched && e.dispatched_to == vm_name) return id;
    }
    return std::nullopt;
}

bool JobQueue::vm_idle(const std::string& vm_name) const {
    auto it = workers_.find(vm_name);
    return it != workers_.end() && !it->second.busy;
}

std::size_t JobQueue::live_job_count() const {
    std::size_t n = 0;
    for (const auto& [id, e] : entries_) {
        if (e.state != QueueState::Completed && e.state != QueueState::Removed) ++n;
    }
    return n;
}

const QueueEntry* JobQueue::find(const std::string& job_id) const {
    auto it = entries_.find(job_id);
    return it == entries_.end() ? nullptr : &it->second;
}

}  // namespace cloudsched
