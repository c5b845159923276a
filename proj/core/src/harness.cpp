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

#include "cloudsched/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cloudsched/persistence.hpp"
#include "cloudsched/scheduler.hpp"
#include "cloudsched/sim_cloud.hpp"
#include "cloudsched/submit.hpp"

namespace cloudsched {

namespace {

struct EventCursor {
    std::size_t next = 0;
};

Millis parse_lost(const std::string& detail) {
    auto pos = detail.find("lost=");
    if (pos == std::string::npos) return 0;
    return std::stoll(detail.substr(pos + 5));
}

std::string detail_reason(const std::string& detail) {
    auto pos = detail.find("reason=");
    if (pos == std::string::npos) return {};
    auto end = detail.find(' ', pos);
    return detail.substr(pos + 7, end == std::string::npos ? std::string::npos : end - pos - 7);
}

bool detail_dispatched(const std::string& detail) {
    return detail.find("dispatched=1") != std::string::npos;
}

class ScenarioRun {
public:
    ScenarioRun(const Scenario& s, std::optional<RestartSpec> restart)
        : scenario_(s), restart_(std::move(restart)) {}

    RunResult run();

private:
    void on_event(const TraceEvent& e);
    void submit_arrival(const Arrival& a, Millis now);
    void fire_fault(const FaultScript& f, Millis now, std::uint64_t cycle);
    void check_invariants(Millis now);
    bool check_every_cycle() const;
    void sample(std::uint64_t cycle, Millis now);
    SimCloudBackend* sim_backend(const std::string& cluster);

    const Scenario& scenario_;
    std::optional<RestartSpec> restart_;

    SchedulerState st_;
    JobQueue queue_;
    BackendMap backends_;

    RunResult rr_;
    long next_cluster_id_ = 1;
    Millis submitted_ms_ = 0;
    Millis completed_ms_ = 0;
    Millis wasted_ms_ = 0;
    std::map<std::string, int> live_per_user_;
    int dispatched_count_ = 0;
    std::size_t entry_estimate_ = 0;
};

SimCloudBackend* ScenarioRun::sim_backend(const std::string& cluster) {
    auto it = backends_.find(cluster);
    return it == backends_.end() ? nullptr : static_cast<SimCloudBackend*>(it->second.get());
}

void ScenarioRun::on_event(const TraceEvent& e) {
    rr_.trace.push_back(e);
    Metrics& m = rr_.metrics;
    if (e.kind == trace_kind::kBoot) {
        ++m.boots;
    } else if (e.kind == trace_kind::kBootRejected) {
        ++m.boot_rejections;
    } else if (e.kind == trace_kind::kFault) {
        ++m.faults;
    } else if (e.kind == trace_kind::kDispatch) {
        ++dispatched_count_;
    } else if (e.kind == trace_kind::kRequeue) {
        ++m.requeues;
        --dispatched_count_;
        wasted_ms_ += parse_lost(e.detail);
    } else if (e.kind == trace_kind::kHold) {
        ++m.holds;
    } else if (e.kind == trace_kind::kRelease) {
        ++m.releases;
    } else if (e.kind == trace_kind::kSchedRepair) {
        ++m.repairs;
    } else if (e.kind == trace_kind::kShutdown) {
        const std::string reason = detail_reason(e.detail);
        const bool dispatched = detail_dispatched(e.detail);
        if (reason == shutdown_reason::kDrainComplete) {
            ++m.graceful_shutdowns;
        } else if (reason == shutdown_reason::kIdleReap) {
            ++m.idle_reaps;
        } else {
            ++m.kills;
        }
        // A VM retired as "no longer needed" must never be running a job,
        // and graceful rebalancing never kills a loaded VM.
        if (dispatched && (reason == shutdown_reason::kIdleReap ||
                           reason == shutdown_reason::kDrainComplete)) {
            throw Error("safety violation: " + std::string(e.kind) + " " + e.subject + " " +
                        e.detail);
        }
        if (dispatched && reason == shutdown_reason::kRebalanceKill &&
            scenario_.scheduler.rebalance_mode == RebalanceMode::Graceful) {
            throw Error("graceful-mode safety violation: killed loaded VM " + e.subject);
        }
    }
}

void ScenarioRun::submit_arrival(const Arrival& a, Millis now) {
    SubmitParse parsed = parse_submit(a.submit_text);
    for (int k = 0; k < a.count; ++k) {
        auto jobs = descriptor_to_jobs(parsed.descriptor, a.user, next_cluster_id_++);
        std::vector<Millis> durations(jobs.size(), a.duration);
        queue_.submit(jobs, durations, now);
        for (const auto& j : jobs) {
            ++rr_.metrics.jobs_submitted;
            submitted_ms_ += a.duration;
            live_per_user_[a.user] += 1;
            ++entry_estimate_;
            on_event({now, 0, trace_kind::kArrival, j.global_job_id,
                      "user=" + a.user + " vmtype=" + j.vmtype});
        }
    }
}

void ScenarioRun::fire_fault(const FaultScript& f, Millis now, std::uint64_t cycle) {
    Cluster* cluster = st_.pool.find(f.cluster);
    SimCloudBackend* be = sim_backend(f.cluster);
    if (!cluster || !be) return;

    std::vector<std::string> live;
    for (const auto& vm : cluster->vms) {
        if (vm.vmstate != VmState::Error) live.push_back(vm.name);
    }
    if (live.empty()) return;
    std::sort(live.begin(), live.end());

    std::string victim;
    if (f.selector == "any") {
        victim = live.front();
    } else if (f.selector.rfind("index:", 0) == 0) {
        const std::size_t idx = std::stoul(f.selector.substr(6));
        if (idx >= live.size()) return;
        victim = live[idx];
    } else if (f.selector.rfind("name:", 0) == 0) {
        victim = f.selector.substr(5);
    } else {
        throw ScenarioError("bad fault selector '" + f.selector + "'");
    }
    if (be->force_fault(*cluster, victim, now)) {
        on_event({now, cycle, trace_kind::kFault, victim, "scripted"});
    }
}

void ScenarioRun::check_invariants(Millis now) {
    (void)now;
    for (const auto& c : st_.pool.clusters) {
        if (static_cast<int>(c.vms.size()) > c.vm_slots) {
            throw Error("capacity violation on " + c.name);
        }
        for (const auto& vm : c.vms) {
            if (vm.clusteraddr != c.host) throw Error("clusteraddr mismatch for " + vm.name);
        }
    }
    // No job lost or duplicated: submitted work = completed + live totals.
    Millis live_total = 0, live_done = 0;
    queue_.for_each_entry([&](const QueueEntry& e) {
        if (e.state == QueueState::Completed || e.state == QueueState::Removed) return;
        live_total += e.total_work;
        live_done += e.total_work - e.remaining_work;
    });
    if (submitted_ms_ != completed_ms_ + live_total) {
        throw Error("work conservation violated: submitted=" + std::to_string(submitted_ms_) +
                    " completed=" + std::to_string(completed_ms_) +
                    " live=" + std::to_string(live_total));
    }
    // No phantom progress: delivered work = completed + in-flight + wasted.
    if (queue_.total_work_performed() != completed_ms_ + live_done + wasted_ms_) {
        throw Error("progress conservation violated");
    }
}

bool ScenarioRun::check_every_cycle() const {
    // The full queue walk is quadratic over a long run; desk-scale
    // scenarios still get it every cycle.
    return entry_estimate_ <= 2500;
}

void ScenarioRun::sample(std::uint64_t cycle, Millis now) {
    CycleSample cs;
    cs.cycle = cycle;
    cs.time = now;
    for (const auto& c : st_.pool.clusters) {
        for (const auto& vm : c.vms) {
            cs.vms_per_user[vm.owner] += 1;
            cs.total_vms += 1;
        }
    }
    for (const auto& [user, n] : live_per_user_) {
        if (n > 0) cs.live_jobs_per_user[user] = n;
    }
    cs.dispatched = dispatched_count_;
    rr_.metrics.timeseries.push_back(std::move(cs));
}

RunResult ScenarioRun::run() {
    st_.clock = Clock::virtual_clock();
    for (const auto& d : scenario_.clouds) {
        if (st_.pool.find(d.cluster.name)) {
            throw ScenarioError("duplicate cluster " + d.cluster.name);
        }
        st_.pool.clusters.push_back(d.cluster);
        if (d.cluster.cloud_type == CloudType::Simulated) {
            backends_[d.cluster.name] =
                std::make_unique<SimCloudBackend>(d.cluster.name, d.sim);
        }
    }

    auto make_engine = [this] {
        return std::make_unique<SchedulerEngine>(
            st_, queue_, backends_, scenario_.scheduler,
            [this](const TraceEvent& e) { on_event(e); });
    };
    auto engine = make_engine();

    std::size_t next_arrival = 0, next_fault = 0;
    for (std::uint64_t cycle = 0;; ++cycle) {
        const Millis now = static_cast<Millis>(cycle) * scenario_.cycle_period;
        if (now > scenario_.horizon) break;

        if (restart_ && restart_->at_cycle == cycle) {
            std::string path = restart_->snapshot_path;
            if (path.empty()) {
                path = (std::filesystem::temp_directory_path() /
                        ("cloudsched-restart-" + std::to_string(::getpid()) + ".json"))
                           .string();
            }
            save_snapshot_file(st_, path);
            on_event({st_.clock.now(), cycle, trace_kind::kPersist, path, ""});
            st_ = load_snapshot_file(path);
            engine = make_engine();  // a restarted scheduler starts cold
            on_event({st_.clock.now(), cycle, trace_kind::kRestore, path, ""});
        }

        st_.clock.advance_to(now);

        if (cycle > 0) {
            for (const auto& id : queue_.advance_work(scenario_.cycle_period)) {
                const QueueEntry* e = queue_.find(id);
                completed_ms_ += e->total_work;
                rr_.metrics.jobs_completed += 1;
                rr_.metrics.makespan = now;
                rr_.metrics.core_hours += static_cast<double>(e->job.vm_cpu_cores) *
                                          static_cast<double>(e->total_work) /
                                          static_cast<double>(kMillisPerHour);
                live_per_user_[e->job.user] -= 1;
                --dispatched_count_;
                on_event({now, cycle, trace_kind::kComplete, id, "user=" + e->job.user});
            }
        }

        for (auto& cluster : st_.pool.clusters) {
            if (SimCloudBackend* be = sim_backend(cluster.name)) {
                be->advance_to(cluster, now, [&](const WorkerAdLike& ad) {
                    queue_.advertise({ad.vm_name, ad.vmtype, false, ad.registered_at});
                    on_event({ad.registered_at, cycle, trace_kind::kVmRunning, ad.vm_name,
                              "vmtype=" + ad.vmtype});
                });
            }
        }

        while (next_arrival < scenario_.arrivals.size() &&
               scenario_.arrivals[next_arrival].time <= now) {
            submit_arrival(scenario_.arrivals[next_arrival++], now);
        }
        while (next_fault < scenario_.faults.size() &&
               scenario_.faults[next_fault].time <= now) {
            fire_fault(scenario_.faults[next_fault++], now, cycle);
        }
        for (auto& cluster : st_.pool.clusters) {
            if (SimCloudBackend* be = sim_backend(cluster.name)) {
                for (const auto& name : be->inject_faults(cluster, cycle, now)) {
                    on_event({now, cycle, trace_kind::kFault, name, "injected"});
                }
            }
        }

        engine->run_cycle(cycle);

        for (const auto& d : queue_.dispatch_cycle()) {
            on_event({now, cycle, trace_kind::kDispatch, d.job_id, "vm=" + d.vm_name});
        }

        if (check_every_cycle() || (cycle % 32) == 0) check_invariants(now);
        sample(cycle, now);

        const bool arrivals_done = next_arrival == scenario_.arrivals.size();
        if (arrivals_done && queue_.live_job_count() == 0 && st_.pool.total_vms() == 0) {
            break;
        }
    }

    check_invariants(st_.clock.now());
    rr_.metrics.wasted_work = wasted_ms_;
    return std::move(rr_);
}

}  // namespace

RunResult run_scenario(const Scenario& s, const std::optional<RestartSpec>& restart) {
    ScenarioRun run(s, restart);
    return run.run();
}

std::optional<TraceDivergence> compare_runs(const std::vector<TraceEvent>& a,
                                            const std::vector<TraceEvent>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a[i] == b[i])) return TraceDivergence{i, a[i], b[i]};
    }
    if (a.size() != b.size()) {
        TraceDivergence d;
        d.index = n;
        if (n < a.size()) d.a = a[n];
        if (n < b.size()) d.b = b[n];
        return d;
    }
    return std::nullopt;
}

std::vector<TraceEvent> filter_trace(const std::vector<TraceEvent>& trace,
                                     const std::string& drop_kind) {
    std::vector<TraceEvent> out;
    out.reserve(trace.size());
    for (const auto& e : trace) {
        if (e.kind != drop_kind) out.push_back(e);
    }
    return out;
}

std::string format_trace_event(const TraceEvent& e) {
    std::ostringstream os;
    os << e.time << " c" << e.cycle << " " << e.kind << " " << e.subject;
    if (!e.detail.empty()) os << " " << e.detail;
    return os.str();
}

std::string render_metrics_text(const Metrics& m) {
    std::ostringstream os;
    os << "jobs submitted:      " << m.jobs_submitted << "\n"
       << "jobs completed:      " << m.jobs_completed << "\n"
       << "makespan:            " << format_duration(m.makespan) << " (" << m.makespan
       << " ms)\n"
       << "core hours:          " << m.core_hours << "\n"
       << "boots:               " << m.boots << "\n"
       << "boot rejections:     " << m.boot_rejections << "\n"
       << "kills:               " << m.kills << "\n"
       << "graceful shutdowns:  " << m.graceful_shutdowns << "\n"
       << "idle reaps:          " << m.idle_reaps << "\n"
       << "requeues:            " << m.requeues << "\n"
       << "holds/releases:      " << m.holds << "/" << m.releases << "\n"
       << "sched repairs:       " << m.repairs << "\n"
       << "faults:              " << m.faults << "\n"
       << "wasted work:         " << format_duration(m.wasted_work) << "\n";
    return os.str();
}

void write_reports(const RunResult& rr, const std::string& outdir) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);

    std::ofstream report(fs::path(outdir) / "report.txt");
    report << render_metrics_text(rr.metrics);

    nlohmann::json mj{
        {"jobs_submitted", rr.metrics.jobs_submitted},
        {"jobs_completed", rr.metrics.jobs_completed},
        {"makespan_ms", rr.metrics.makespan},
        {"core_hours", rr.metrics.core_hours},
        {"boots", rr.metrics.boots},
        {"boot_rejections", rr.metrics.boot_rejections},
        {"kills", rr.metrics.kills},
        {"graceful_shutdowns", rr.metrics.graceful_shutdowns},
        {"idle_reaps", rr.metrics.idle_reaps},
        {"requeues", rr.metrics.requeues},
        {"holds", rr.metrics.holds},
        {"releases", rr.metrics.releases},
        {"repairs", rr.metrics.repairs},
        {"faults", rr.metrics.faults},
        {"wasted_work_ms", rr.metrics.wasted_work},
    };
    std::ofstream mfile(fs::path(outdir) / "metrics.json");
    mfile << mj.dump(2) << "\n";

    std::ofstream ts(fs::path(outdir) / "timeseries.csv");
    ts << "cycle,time_ms,user,vms,live_jobs\n";
    for (const auto& cs : rr.metrics.timeseries) {
        std::map<std::string, std::pair<int, int>> users;
        for (const auto& [u, n] : cs.vms_per_user) users[u].first = n;
        for (const auto& [u, n] : cs.live_jobs_per_user) users[u].second = n;
        for (const auto& [u, counts] : users) {
            ts << cs.cycle << "," << cs.time << "," << u << "," << counts.first << ","
               << counts.second << "\n";
        }
    }

    std::ofstream tr(fs::path(outdir) / "trace.jsonl");
    for (const auto& e : rr.trace) {
        nlohmann::json ej{{"time", e.time},
                          {"cycle", e.cycle},
                          {"kind", e.kind},
                          {"subject", e.subject},
                          {"detail", e.detail}};
        tr << ej.dump() << "\n";
    }
}

}  // namespace cloudsched
