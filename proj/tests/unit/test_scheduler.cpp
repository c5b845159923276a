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

#include <doctest.h>

#include <filesystem>

#include "cloudsched/persistence.hpp"
#include "cloudsched/scheduler.hpp"
#include "support/rig.hpp"

using namespace cloudsched;
using test::make_cluster;
using test::make_job;
using test::Rig;

TEST_SUITE("scheduler") {

TEST_CASE("one new job on one fitting cluster plans one boot") {
    Rig rig({make_cluster("c1", 4)});
    rig.submit({make_job("1.0", "alice", "w")}, kMillisPerHour);
    rig.engine->job_poller();
    ActionPlan p = rig.engine->plan();
    REQUIRE(p.boots.size() == 1);
    CHECK(p.boots[0].cluster == "c1");
    CHECK(p.boots[0].owner == "alice");
    CHECK(p.boots[0].job_id == "1.0");
    CHECK(p.graceful_shutdowns.empty());
    CHECK(p.kills.empty());
}

TEST_CASE("an unsatisfiable job produces no action and stays New") {
    Rig rig({make_cluster("c1", 4)});
    rig.st.pool.clusters[0].cpu_archs = {CpuArch::X86};
    Job j = make_job("1.0", "alice", "w");
    j.vm_cpu_arch = CpuArch::X86_64;
    rig.submit({j}, kMillisPerHour);
    rig.step();
    CHECK(rig.st.pool.total_vms() == 0);
    REQUIRE(rig.st.job_pool.new_list.size() == 1);
    CHECK(rig.st.job_pool.new_list[0].sched_state == SchedState::New);
}

TEST_CASE("apply boot creates a Starting VM and schedules the job") {
    Rig rig({make_cluster("c1", 4)});
    rig.submit({make_job("1.0", "alice", "w")}, kMillisPerHour);
    rig.engine->job_poller();
    rig.engine->apply_plan(rig.engine->plan());
    REQUIRE(rig.st.pool.clusters[0].vms.size() == 1);
    CHECK(rig.st.pool.clusters[0].vms[0].vmstate == VmState::Starting);
    CHECK(rig.st.job_pool.new_list.empty());
    REQUIRE(rig.st.job_pool.scheduled_list.size() == 1);
    CHECK(rig.st.job_pool.scheduled_list[0].sched_state == SchedState::Scheduled);
}

TEST_CASE("a rejected boot leaves the job New and reports the failure") {
    SimCloudConfig sim;
    sim.boot_failure_rate = 1.0;
    Rig rig({make_cluster("c1", 4)}, {}, sim);
    rig.submit({make_job("1.0", "alice", "w")}, kMillisPerHour);
    rig.engine->job_poller();
    CycleReport r = rig.engine->apply_plan(rig.engine->plan());
    CHECK(r.boots == 0);
    CHECK(r.boot_failures == 1);
    CHECK(rig.st.job_pool.new_list.size() == 1);
    CHECK(rig.st.pool.total_vms() == 0);
}

TEST_CASE("second user halves the first user's allocation") {
    SchedulerConfig graceful;
    Rig rig({make_cluster("c1", 20)}, graceful);
    std::vector<Job> a_jobs;
    for (int i = 0; i < 40; ++i) a_jobs.push_back(make_job("1." + std::to_string(i), "ua", "ta"));
    rig.submit(a_jobs, 5 * kMillisPerHour);
    rig.step();
    CHECK(rig.vms_owned_by("ua") == 20);
    rig.step();  // VMs running, jobs dispatched

    std::vector<Job> b_jobs;
    for (int i = 0; i < 40; ++i) b_jobs.push_back(make_job("2." + std::to_string(i), "ub", "tb"));
    rig.submit(b_jobs, 5 * kMillisPerHour);
    rig.engine->job_poller();

    ActionPlan p = rig.engine->plan();
    CHECK(p.graceful_shutdowns.size() == 10);
    CHECK(p.kills.empty());
    CHECK(p.boots.empty());  // cluster still full; boots follow as slots free
    CHECK_FALSE(p.holds.empty());

    SUBCASE("kill mode retires the surplus immediately") {
        SchedulerConfig kill_cfg;
        kill_cfg.rebalance_mode = RebalanceMode::Kill;
        SchedulerEngine killer(rig.st, rig.queue, rig.backends, kill_cfg);
        ActionPlan kp = killer.plan();
        CHECK(kp.kills.size() == 10);
        CHECK(kp.graceful_shutdowns.empty());
        CHECK(kp.holds.empty());
        CycleReport r = killer.apply_plan(kp);
        CHECK(r.kills == 10);
        CHECK(r.requeues == 10);
        CHECK(rig.vms_owned_by("ua") == 10);
    }
}

TEST_CASE("killing a VM requeues its job") {
    Rig rig({make_cluster("c1", 2)});
    rig.submit({make_job("1.0", "alice", "w")}, 5 * kMillisPerHour);
    rig.step();
    rig.step();
    REQUIRE(rig.queue.find("1.0")->state == QueueState::Dispatched);
    const std::string vm = rig.st.pool.clusters[0].vms[0].name;

    ActionPlan p;
    p.kills.push_back(vm);
    CycleReport r = rig.engine->apply_plan(p);
    CHECK(r.kills == 1);
    CHECK(r.requeues == 1);
    CHECK(rig.queue.find("1.0")->state == QueueState::Queued);
    CHECK(rig.queue.find("1.0")->remaining_work == 5 * kMillisPerHour);
    CHECK(rig.st.pool.total_vms() == 0);
}

TEST_CASE("error sweep kills and replaces when demand remains") {
    Rig rig({make_cluster("c1", 4)});
    rig.submit({make_job("1.0", "alice", "w"), make_job("1.1", "alice", "w"),
                make_job("1.2", "alice", "w")},
               kMillisPerHour);
    rig.step();  // boots 3
    rig.step();
    REQUIRE(rig.st.pool.clusters[0].vms.size() == 3);
    rig.sim("c1").force_fault(rig.st.pool.clusters[0], rig.st.pool.clusters[0].vms[0].name,
                              rig.st.clock.now());

    ActionPlan p = rig.engine->error_sweep();
    REQUIRE(p.kills.size() == 1);
    REQUIRE(p.boots.size() == 1);
    CHECK(p.boots[0].owner == "alice");
    CHECK(p.boots[0].spec.vmtype == "w");
    CHECK(p.boots[0].job_id.empty());
}

TEST_CASE("error sweep without demand only kills") {
    Rig rig({make_cluster("c1", 4)});
    rig.st.pool.clusters[0].vms.push_back(
        test::make_vm("c1-vm-9", "w", "alice", "c1.cloud", VmState::Error));
    ActionPlan p = rig.engine->error_sweep();
    CHECK(p.kills.size() == 1);
    CHECK(p.boots.empty());

    SUBCASE("nothing errored, nothing planned") {
        rig.st.pool.clusters[0].vms.clear();
        ActionPlan empty = rig.engine->error_sweep();
        CHECK(empty.kills.empty());
        CHECK(empty.boots.empty());
    }
}

TEST_CASE("replacements stay on clouds of the same locator kind") {
    Cluster full = make_cluster("sim", 1);  // only slot holds the errored VM
    Cluster amazon = make_cluster("amazon", 4);
    amazon.cloud_type = CloudType::Ec2;
    Rig rig({full, amazon});
    rig.submit({make_job("1.0", "alice", "w")}, kMillisPerHour);
    rig.engine->job_poller();
    rig.st.pool.clusters[0].vms.push_back(
        test::make_vm("sim-vm-0", "w", "alice", "sim.cloud", VmState::Error));

    ActionPlan p = rig.engine->error_sweep();
    REQUIRE(p.kills.size() == 1);
    // demand exists, but the URL image cannot boot on the ec2-style cloud:
    // the freed slot on the original cluster is the only candidate
    REQUIRE(p.boots.size() == 1);
    CHECK(p.boots[0].cluster == "sim");
}

TEST_CASE("error threshold sweeps flaky-but-running VMs") {
    SchedulerConfig cfg;
    cfg.error_threshold = 3;
    Rig rig({make_cluster("c1", 4)}, cfg);
    VmRecord vm = test::make_vm("c1-vm-0", "w", "alice", "c1.cloud", VmState::Running);
    vm.error_count = 2;
    rig.st.pool.clusters[0].vms.push_back(vm);
    CHECK(rig.engine->error_sweep().kills.empty());
    rig.st.pool.clusters[0].vms[0].error_count = 3;
    CHECK(rig.engine->error_sweep().kills.size() == 1);
}

TEST_CASE("replacement lands on the slot freed by the kill") {
    Rig rig({make_cluster("c1", 1)});  // single slot
    rig.submit({make_job("1.0", "alice", "w")}, 5 * kMillisPerHour);
    rig.step();
    rig.step();
    rig.sim("c1").force_fault(rig.st.pool.clusters[0], rig.st.pool.clusters[0].vms[0].name,
                              rig.st.clock.now());
    CycleReport r = rig.step();
    CHECK(r.kills == 1);
    CHECK(r.boots == 1);  // same cycle, same slot
    REQUIRE(rig.st.pool.clusters[0].vms.size() == 1);
    CHECK(rig.st.pool.clusters[0].vms[0].vmstate == VmState::Starting);
}

TEST_CASE("cleanup reaps idle VMs with no outstanding work of their type") {
    Rig rig({make_cluster("c1", 4)});
    rig.submit({make_job("1.0", "alice", "w")}, 60 * kMillisPerSecond);
    rig.step();
    rig.step();          // dispatched
    rig.step();          // job completes during this step
    CHECK(rig.queue.find("1.0")->state == QueueState::Completed);
    // the VM was reaped in the same cycle's cleanup
    CHECK(rig.st.pool.total_vms() == 0);
    CHECK(rig.count_events(trace_kind::kShutdown) == 1);

    SUBCASE("a queued job of the type keeps the VM alive") {
        Rig rig2({make_cluster("c1", 1)});
        rig2.submit({make_job("1.0", "a", "w"), make_job("1.1", "a", "w")},
                    60 * kMillisPerSecond);
        rig2.step();
        rig2.step();
        rig2.step();  // first job done; second queued
        CHECK(rig2.st.pool.total_vms() == 1);
    }
}

TEST_CASE("jobs stranded by a dead VM flip back to New") {
    Rig rig({make_cluster("c1", 1)});
    rig.submit({make_job("1.0", "alice", "w")}, 5 * kMillisPerHour);
    rig.step();
    REQUIRE(rig.st.job_pool.scheduled_list.size() == 1);
    // Kill the only VM through a fault with no replacement possible: shrink
    // the cluster first so the replacement boot fails.
    rig.st.pool.clusters[0].vm_slots = 1;
    rig.sim("c1").force_fault(rig.st.pool.clusters[0], rig.st.pool.clusters[0].vms[0].name,
                              rig.st.clock.now());
    SchedulerConfig no_boot = rig.engine->config();
    SimCloudConfig reject;
    reject.boot_failure_rate = 1.0;
    rig.backends["c1"] = std::make_unique<SimCloudBackend>("c1", reject);
    SchedulerEngine eng2(rig.st, rig.queue, rig.backends, no_boot);
    eng2.run_cycle(99);
    REQUIRE(rig.st.job_pool.new_list.size() == 1);
    CHECK(rig.st.job_pool.new_list[0].sched_state == SchedState::New);
    CHECK(rig.st.pool.total_vms() == 0);
}

TEST_CASE("five jobs, five slots: one cycle boots five VMs") {
    Rig rig({make_cluster("c1", 5)});
    std::vector<Job> jobs;
    for (int i = 0; i < 5; ++i) jobs.push_back(make_job("1." + std::to_string(i), "a", "w"));
    rig.submit(jobs, kMillisPerHour);
    CycleReport r = rig.step();
    CHECK(r.boots == 5);
    CHECK(rig.st.pool.total_vms() == 5);
    for (const auto& vm : rig.st.pool.clusters[0].vms) CHECK(vm.vmstate == VmState::Starting);
}

TEST_CASE("two thousand jobs fill exactly the eighty available slots") {
    Rig rig({make_cluster("uvic", 40), make_cluster("nrc", 30), make_cluster("ec2", 10)});
    std::vector<Job> jobs;
    jobs.reserve(2000);
    for (int i = 0; i < 2000; ++i) jobs.push_back(make_job("1." + std::to_string(i), "a", "w"));
    rig.submit(jobs, 7 * kMillisPerHour);
    CycleReport r = rig.step();
    CHECK(r.boots == 80);
    CHECK(rig.st.pool.total_vms() == 80);
    CHECK(rig.st.pool.clusters[0].vms.size() == 40);
    CHECK(rig.st.pool.clusters[1].vms.size() == 30);
    CHECK(rig.st.pool.clusters[2].vms.size() == 10);
}

TEST_CASE("no clusters: the cycle is a no-op and jobs stay New") {
    Rig rig({});
    rig.submit({make_job("1.0", "a", "w")}, kMillisPerHour);
    CycleReport r = rig.step();
    CHECK(r.boots == 0);
    CHECK(rig.st.job_pool.new_list.size() == 1);
}

TEST_CASE("boot timeout turns a hung Starting VM into a fault") {
    SchedulerConfig cfg;
    cfg.boot_timeout = 2 * kMillisPerMinute;
    SimCloudConfig slow;
    slow.boot_latency_min = slow.boot_latency_max = kMillisPerHour;  // hung
    Rig rig({make_cluster("c1", 2)}, cfg, slow);
    rig.submit({make_job("1.0", "a", "w")}, kMillisPerHour);
    rig.step();
    CHECK(rig.st.pool.clusters[0].vms[0].vmstate == VmState::Starting);
    rig.step();
    rig.step();
    rig.step();  // > boot_timeout elapsed; fault, sweep, replacement boot
    CHECK(rig.count_events(trace_kind::kFault) >= 1);
    bool replaced = false;
    for (const auto& vm : rig.st.pool.clusters[0].vms) {
        if (vm.vmstate == VmState::Starting) replaced = true;
        CHECK(vm.vmstate != VmState::Error);
    }
    CHECK(replaced);
}

TEST_CASE("graceful drain waits for the job, holds pending same-type work") {
    Rig rig({make_cluster("c1", 2)});
    rig.submit({make_job("1.0", "ua", "ta"), make_job("1.1", "ua", "ta"),
                make_job("1.2", "ua", "ta")},
               10 * kMillisPerHour);
    rig.step();
    rig.step();  // both VMs busy, one job pending
    CHECK(rig.vms_owned_by("ua") == 2);

    rig.submit({make_job("2.0", "ub", "tb")}, kMillisPerHour);
    CycleReport r = rig.step();
    CHECK(r.drains_marked == 1);
    CHECK(r.holds == 1);  // the pending ta job
    CHECK(rig.st.draining.size() == 1);
    CHECK(rig.queue.find("1.2")->state == QueueState::Held);
    // nothing was shut down: both VMs still run their jobs
    CHECK(rig.st.pool.total_vms() == 2);
    CHECK(rig.count_events(trace_kind::kShutdown) == 0);

    // finish the draining VM's job: drain completes, hold releases
    const std::string draining = *rig.st.draining.begin();
    auto job_on_draining = rig.queue.dispatched_job_on(draining);
    REQUIRE(job_on_draining.has_value());
    rig.queue.advance_work(10 * kMillisPerHour);  // everything running finishes
    rig.step();
    CHECK(rig.st.draining.empty());
    CHECK(rig.st.pool.find_vm(draining) == nullptr);
    rig.step();  // release happens in the next plan
    CHECK(rig.queue.find("1.2")->state != QueueState::Held);
    CHECK(rig.st.rebalance_holds.empty());
}

TEST_CASE("drain timeout kills a stuck drain when configured") {
    SchedulerConfig cfg;
    cfg.drain_timeout = 2 * kMillisPerMinute;
    Rig rig({make_cluster("c1", 2)}, cfg);
    rig.submit({make_job("1.0", "ua", "ta"), make_job("1.1", "ua", "ta")},
               100 * kMillisPerHour);
    rig.step();
    rig.step();  // both of ua's jobs running
    rig.submit({make_job("2.0", "ub", "tb")}, kMillisPerHour);
    rig.step();  // fair share {ua:1, ub:1}: one drain marked
    CHECK(rig.st.draining.size() == 1);
    rig.step();
    rig.step();  // past the timeout: the stuck drain is killed
    CHECK(rig.st.draining.empty());
    CHECK(rig.count_events(trace_kind::kRequeue) == 1);
    CHECK(rig.vms_owned_by("ua") == 1);
}

TEST_CASE("kill-all shuts everything down; persist leaves VMs running") {
    Rig rig({make_cluster("c1", 4)});
    rig.submit({make_job("1.0", "a", "w"), make_job("1.1", "a", "w"),
                make_job("1.2", "a", "w")},
               5 * kMillisPerHour);
    rig.step();
    rig.step();
    REQUIRE(rig.st.pool.total_vms() == 3);

    SUBCASE("kill-all") {
        ShutdownReport r = rig.engine->shutdown(ShutdownMode::KillAll);
        CHECK(r.shutdowns == 3);
        CHECK(rig.st.pool.total_vms() == 0);
    }

    SUBCASE("persist and resume") {
        auto path = (std::filesystem::temp_directory_path() / "cs-test-state.json").string();
        ShutdownReport r = rig.engine->shutdown(ShutdownMode::Persist, path);
        CHECK(r.snapshot_path == path);
        CHECK(rig.st.pool.total_vms() == 3);  // VMs keep running

        SchedulerState restored = load_snapshot_file(path);
        CHECK(state_equal(restored, rig.st));

        // resume managing against the same queue and clouds
        SchedulerEngine resumed(restored, rig.queue, rig.backends, rig.engine->config());
        resumed.run_cycle(rig.cycle);
        CHECK(restored.pool.total_vms() == 3);
        std::filesystem::remove(path);
    }
}

TEST_CASE("fairness convergence within capacity + users cycles") {
    const int capacity = 12;
    Rig rig({make_cluster("c1", capacity)});
    std::vector<Job> a, b, c;
    for (int i = 0; i < 30; ++i) {
        a.push_back(make_job("1." + std::to_string(i), "ua", "ta"));
        b.push_back(make_job("2." + std::to_string(i), "ub", "tb"));
        c.push_back(make_job("3." + std::to_string(i), "uc", "tc"));
    }
    rig.submit(a, 2 * kMillisPerHour);
    rig.step();
    rig.step();
    CHECK(rig.vms_owned_by("ua") == capacity);
    rig.submit(b, 2 * kMillisPerHour);
    rig.submit(c, 2 * kMillisPerHour);
    for (int i = 0; i < capacity + 3 + 130; ++i) rig.step();  // jobs are 120 cycles long
    CHECK(rig.vms_owned_by("ua") == 4);
    CHECK(rig.vms_owned_by("ub") == 4);
    CHECK(rig.vms_owned_by("uc") == 4);
}

}  // TEST_SUITE
