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

#include "daemon.hpp"

#include <algorithm>
#include <condition_variable>
#include <csignal>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cloudsched/ipc.hpp"
#include "cloudsched/persistence.hpp"
#include "cloudsched/sim_cloud.hpp"
#include "cloudsched/submit.hpp"

#ifdef CLOUDSCHED_HAVE_SPDLOG
#include <spdlog/spdlog.h>
#define DLOG(...) spdlog::info(__VA_ARGS__)
#else
#define DLOG(...) (void)0
#endif

namespace cloudsched {

namespace {

using nlohmann::json;

volatile std::sig_atomic_t g_sigterm = 0;
volatile std::sig_atomic_t g_sighup = 0;

void on_signal(int sig) {
    if (sig == SIGHUP) {
        g_sighup = 1;
    } else {
        g_sigterm = 1;
    }
}

struct Daemon {
    GeneralConfig gcfg;
    std::string clouds_path;

    SchedulerState st;
    JobQueue queue;
    BackendMap backends;
    std::unique_ptr<SchedulerEngine> engine;

    std::mutex mu;
    std::condition_variable stop_cv;
    bool stopping = false;
    ShutdownMode final_mode = ShutdownMode::KillAll;

    std::uint64_t cycle = 0;
    Millis last_advance = 0;
    long next_cluster_id = 1;

    // Called under the lock: deliver due cloud events, advance simulated
    // work by the elapsed wall time, let the queue match.
    void deliver_and_dispatch() {
        const Millis now = st.clock.now();
        for (auto& cluster : st.pool.clusters) {
            auto it = backends.find(cluster.name);
            if (it == backends.end()) continue;
            auto* sim = static_cast<SimCloudBackend*>(it->second.get());
            sim->advance_to(cluster, now, [&](const WorkerAdLike& ad) {
                queue.advertise({ad.vm_name, ad.vmtype, false, ad.registered_at});
            });
            sim->inject_faults(cluster, cycle, now);
        }
        queue.advance_work(std::max<Millis>(0, now - last_advance));
        last_advance = now;
        queue.dispatch_cycle();
    }

    std::string handle(const std::string& line) {
        json req;
        try {
            req = json::parse(line);
        } catch (const json::exception&) {
            return json{{"ok", false}, {"error", "bad request"}}.dump();
        }
        const std::string cmd = req.value("cmd", "");
        try {
            if (cmd == "ping") return json{{"ok", true}, {"data", "pong"}}.dump();
            if (cmd == "status") {
                std::scoped_lock lock(mu);
                return json{{"ok", true}, {"snapshot", snapshot(st)}}.dump();
            }
            if (cmd == "submit") {
                const std::string user = req.value("user", "");
                const std::string text = req.value("submit", "");
                if (user.empty()) return json{{"ok", false}, {"error", "missing user"}}.dump();
                SubmitParse parsed = parse_submit(text);
                Millis duration = gcfg.default_job_duration;
                auto it = parsed.descriptor.vm_attrs.find("SimDuration");
                if (it != parsed.descriptor.vm_attrs.end()) duration = parse_duration(it->second);
                std::scoped_lock lock(mu);
                auto jobs = descriptor_to_jobs(parsed.descriptor, user, next_cluster_id++);
                auto ids = queue.submit(jobs, std::vector<Millis>(jobs.size(), duration),
                                        st.clock.now());
                json out{{"ok", true}, {"ids", ids}};
                if (!parsed.warnings.empty()) out["warnings"] = parsed.warnings;
                return out.dump();
            }
            if (cmd == "shutdown") {
                const std::string mode = req.value("mode", "");
                {
                    std::scoped_lock lock(mu);
                    if (mode == "persist") {
                        final_mode = ShutdownMode::Persist;
                    } else if (mode == "kill-all") {
                        final_mode = ShutdownMode::KillAll;
                    } else {
                        return json{{"ok", false},
                                    {"error", "mode must be persist or kill-all"}}
                            .dump();
                    }
                    stopping = true;
                }
                stop_cv.notify_all();
                return json{{"ok", true}}.dump();
            }
            return json{{"ok", false}, {"error", "unknown command '" + cmd + "'"}}.dump();
        } catch (const std::exception& ex) {
            return json{{"ok", false}, {"error", ex.what()}}.dump();
        }
    }

    void reload_clouds_locked() {
        try {
            for (const auto& line :
                 apply_cloud_update(st.pool, load_clouds_config(clouds_path))) {
                std::cout << "cloudsched: " << line << std::endl;
            }
        } catch (const std::exception& ex) {
            std::cerr << "cloudsched: clouds reload failed: " << ex.what() << std::endl;
        }
    }

    int run() {
        const auto decls = load_clouds_config(clouds_path);

        if (std::filesystem::exists(gcfg.persistence_path)) {
            st = load_snapshot_file(gcfg.persistence_path);
            std::cout << "cloudsched: restored state from " << gcfg.persistence_path << " ("
                      << st.pool.total_vms() << " VMs, " << st.job_pool.size()
                      << " pooled jobs)" << std::endl;
        }
        st.clock = Clock::real();
        apply_cloud_update(st.pool, decls);  // configured statics win

        for (const auto& d : decls) {
            if (d.cluster.cloud_type == CloudType::Simulated) {
                backends[d.cluster.name] =
                    std::make_unique<SimCloudBackend>(d.cluster.name, d.sim);
            }
        }
        engine = std::make_unique<SchedulerEngine>(st, queue, backends, gcfg.scheduler,
                                                   TraceFn{});
        last_advance = st.clock.now();

        ipc::LineServer server(gcfg.ipc_socket,
                               [this](const std::string& line) { return handle(line); });
        server.start();
        std::cout << "cloudsched: managing " << st.pool.clusters.size()
                  << " cluster(s); socket " << gcfg.ipc_socket << std::endl;

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::signal(SIGHUP, on_signal);

        auto interruptible_sleep = [&](Millis interval) {
            std::unique_lock lk(mu);
            stop_cv.wait_for(lk, std::chrono::milliseconds(interval),
                             [this] { return stopping; });
            return !stopping;
        };

        std::jthread poller([&] {
            do {
                std::scoped_lock lock(mu);
                engine->job_poller();
            } while (interruptible_sleep(gcfg.scheduler.poll_interval));
        });

        std::jthread scheduler([&] {
            do {
                std::scoped_lock lock(mu);
                if (g_sighup) {
                    g_sighup = 0;
                    reload_clouds_locked();
                }
                deliver_and_dispatch();
                CycleReport r = engine->scheduler_pass(cycle++);
                if (r.boots || r.kills || r.shutdowns || r.requeues || !r.errors.empty()) {
                    std::cout << "cycle " << cycle - 1 << ": boots=" << r.boots
                              << " kills=" << r.kills << " requeues=" << r.requeues
                              << " errors=" << r.errors.size() << std::endl;
                }
            } while (interruptible_sleep(gcfg.scheduler.schedule_interval));
        });

        std::jthread cleaner([&] {
            do {
                std::scoped_lock lock(mu);
                engine->cleanup();
            } while (interruptible_sleep(gcfg.scheduler.cleanup_interval));
        });

        {
            std::unique_lock lk(mu);
            while (!stopping) {
                stop_cv.wait_for(lk, std::chrono::milliseconds(100),
                                 [this] { return stopping; });
                if (g_sigterm && !stopping) {
                    final_mode = gcfg.scheduler.persist_on_shutdown ? ShutdownMode::Persist
                                                                    : ShutdownMode::KillAll;
                    stopping = true;
                }
            }
        }
        stop_cv.notify_all();
        poller.join();
        scheduler.join();
        cleaner.join();
        server.stop();

        std::scoped_lock lock(mu);
        ShutdownReport rep = engine->shutdown(final_mode, gcfg.persistence_path);
        if (final_mode == ShutdownMode::Persist) {
            std::cout << "cloudsched: state persisted to " << rep.snapshot_path << std::endl;
        } else {
            std::cout << "cloudsched: shut down " << rep.shutdowns << " VM(s)" << std::endl;
        }
        for (const auto& e : rep.errors) std::cerr << "cloudsched: " << e << std::endl;
        return rep.errors.empty() ? 0 : 3;
    }
};

}  // namespace

int run_daemon(const GeneralConfig& gcfg, const std::string& clouds_path) {
    Daemon d;
    d.gcfg = gcfg;
    d.clouds_path = clouds_path;
    return d.run();
}

std::string render_status(const SchedulerState& st) {
    std::ostringstream os;
    const Millis now = st.clock.now();
    os << "CLUSTERS\n";
    if (st.pool.clusters.empty()) os << "    (none)\n";
    for (const auto& c : st.pool.clusters) {
        os << "  " << c.name << " (" << to_string(c.cloud_type) << ", " << c.vms.size() << "/"
           << c.vm_slots << " slots)\n";
        std::vector<const VmRecord*> vms;
        for (const auto& vm : c.vms) vms.push_back(&vm);
        std::sort(vms.begin(), vms.end(),
                  [](const VmRecord* a, const VmRecord* b) { return a->name < b->name; });
        for (const VmRecord* vm : vms) {
            os << "    " << std::left << std::setw(22) << vm->name << std::setw(14)
               << vm->vmtype << std::setw(10) << to_string(vm->vmstate) << std::setw(12)
               << vm->owner
               << "age=" << format_duration(std::max<Millis>(0, now - vm->last_state_change))
               << (st.draining.count(vm->name) ? " draining" : "") << "\n";
        }
    }

    struct UserRow {
        int new_jobs = 0, scheduled = 0, queued = 0, held = 0, dispatched = 0, vms = 0;
    };
    std::map<std::string, UserRow> users;
    auto tally = [&](const Job& j) {
        UserRow& r = users[j.user];
        (j.sched_state == SchedState::New ? r.new_jobs : r.scheduled) += 1;
        if (j.queue_state == QueueState::Queued) r.queued += 1;
        if (j.queue_state == QueueState::Held) r.held += 1;
        if (j.queue_state == QueueState::Dispatched) r.dispatched += 1;
    };
    for (const auto& j : st.job_pool.new_list) tally(j);
    for (const auto& j : st.job_pool.scheduled_list) tally(j);
    for (const auto& c : st.pool.clusters) {
        for (const auto& vm : c.vms) users[vm.owner].vms += 1;
    }

    os << "USERS\n    " << std::left << std::setw(14) << "user" << std::setw(6) << "vms"
       << std::setw(6) << "new" << std::setw(7) << "sched" << std::setw(8) << "queued"
       << std::setw(6) << "held" << "running\n";
    for (const auto& [user, r] : users) {
        os << "    " << std::left << std::setw(14) << user << std::setw(6) << r.vms
           << std::setw(6) << r.new_jobs << std::setw(7) << r.scheduled << std::setw(8)
           << r.queued << std::setw(6) << r.held << r.dispatched << "\n";
    }
    if (users.empty()) os << "    (none)\n";
    return os.str();
}

}  // namespace cloudsched
