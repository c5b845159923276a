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

#include "cloudsched/sim_cloud.hpp"
#include "support/builders.hpp"

using namespace cloudsched;
using test::make_cluster;

namespace {

VmSpec spec_for(const std::string& vmtype, const std::string& owner) {
    VmSpec s;
    s.vmtype = vmtype;
    s.image = "http://repo.cloud/" + vmtype + ".img.gz";
    s.memory_mb = 512;
    s.owner = owner;
    return s;
}

}  // namespace

TEST_SUITE("sim_cloud") {

TEST_CASE("boot starts the VM and latency delivers Running plus the advertisement") {
    Cluster c = make_cluster("c1", 4);
    SimCloudConfig cfg;
    cfg.boot_latency_min = cfg.boot_latency_max = 60'000;
    SimCloudBackend be("c1", cfg);

    be.boot(c, spec_for("worker", "alice"), 0);
    REQUIRE(c.vms.size() == 1);
    CHECK(c.vms[0].vmstate == VmState::Starting);
    CHECK(c.vms[0].hostname.empty());
    CHECK(c.vms[0].owner == "alice");
    CHECK(c.vms[0].clusteraddr == "c1.cloud");

    std::vector<WorkerAdLike> ads;
    be.advance_to(c, 30'000, [&](const WorkerAdLike& ad) { ads.push_back(ad); });
    CHECK(ads.empty());
    CHECK(be.poll(c, c.vms[0].name, 30'000) == VmState::Starting);

    be.advance_to(c, 60'000, [&](const WorkerAdLike& ad) { ads.push_back(ad); });
    REQUIRE(ads.size() == 1);
    CHECK(ads[0].vmtype == "worker");
    CHECK(ads[0].registered_at == 60'000);
    CHECK(c.vms[0].vmstate == VmState::Running);
    CHECK(c.vms[0].hostname == c.vms[0].name + ".c1.cloud");
    CHECK(c.vms[0].last_state_change == 60'000);
}

TEST_CASE("boot failure rate 1.0 rejects every request") {
    Cluster c = make_cluster("c1", 4);
    SimCloudConfig cfg;
    cfg.boot_failure_rate = 1.0;
    SimCloudBackend be("c1", cfg);
    CHECK_THROWS_AS(be.boot(c, spec_for("w", "a"), 0), BootRejected);
    CHECK(c.vms.empty());
}

TEST_CASE("slots are enforced even if the caller raced") {
    Cluster c = make_cluster("c1", 1);
    SimCloudBackend be("c1", {});
    be.boot(c, spec_for("w", "a"), 0);
    CHECK_THROWS_AS(be.boot(c, spec_for("w", "a"), 0), BootRejected);
}

TEST_CASE("same seed, same ids and event times") {
    auto run = [](std::uint64_t seed) {
        Cluster c = make_cluster("c1", 8);
        SimCloudConfig cfg;
        cfg.boot_latency_min = 10'000;
        cfg.boot_latency_max = 120'000;
        cfg.rng_seed = seed;
        SimCloudBackend be("c1", cfg);
        for (int i = 0; i < 5; ++i) be.boot(c, spec_for("w", "a"), i * 1000);
        std::vector<std::pair<std::string, Millis>> ads;
        be.advance_to(c, 500'000,
                      [&](const WorkerAdLike& ad) { ads.emplace_back(ad.vm_name, ad.registered_at); });
        return ads;
    };
    CHECK(run(7) == run(7));
    CHECK(run(7) != run(8));
}

TEST_CASE("a fault while Starting cancels the advertisement") {
    Cluster c = make_cluster("c1", 4);
    SimCloudConfig cfg;
    cfg.boot_latency_min = cfg.boot_latency_max = 60'000;
    SimCloudBackend be("c1", cfg);
    be.boot(c, spec_for("w", "a"), 0);
    REQUIRE(be.force_fault(c, c.vms[0].name, 10'000));
    CHECK(c.vms[0].vmstate == VmState::Error);
    CHECK(c.vms[0].error_count == 1);

    int ads = 0;
    be.advance_to(c, 120'000, [&](const WorkerAdLike&) { ++ads; });
    CHECK(ads == 0);
}

TEST_CASE("shutdown removes the record and pending events, poll then throws") {
    Cluster c = make_cluster("c1", 4);
    SimCloudConfig cfg;
    cfg.boot_latency_min = cfg.boot_latency_max = 60'000;
    SimCloudBackend be("c1", cfg);
    be.boot(c, spec_for("w", "a"), 0);
    const std::string name = c.vms[0].name;

    be.shutdown(c, name);
    CHECK(c.vms.empty());
    CHECK_THROWS_AS(be.poll(c, name, 1000), UnknownVm);
    CHECK_THROWS_AS(be.shutdown(c, name), UnknownVm);

    int ads = 0;
    be.advance_to(c, 120'000, [&](const WorkerAdLike&) { ++ads; });
    CHECK(ads == 0);
}

TEST_CASE("fault injection is keyed by seed, vm and cycle") {
    auto faults_at = [](std::uint64_t seed, std::uint64_t cycle) {
        Cluster c = make_cluster("c1", 8);
        SimCloudConfig cfg;
        cfg.fault_rate = 0.5;
        cfg.rng_seed = seed;
        SimCloudBackend be("c1", cfg);
        for (int i = 0; i < 8; ++i) be.boot(c, spec_for("w", "a"), 0);
        be.advance_to(c, 1000, nullptr);
        return be.inject_faults(c, cycle, 2000);
    };
    CHECK(faults_at(3, 1) == faults_at(3, 1));
    CHECK(faults_at(3, 1) != faults_at(3, 2));

    Cluster c = make_cluster("c1", 8);
    SimCloudConfig cfg;  // fault_rate 0
    SimCloudBackend be("c1", cfg);
    be.boot(c, spec_for("w", "a"), 0);
    CHECK(be.inject_faults(c, 0, 0).empty());
}

TEST_CASE("poll refreshes lastpoll and reports the post-fault state") {
    Cluster c = make_cluster("c1", 2);
    SimCloudBackend be("c1", {});
    be.boot(c, spec_for("w", "a"), 0);
    be.advance_to(c, 10, nullptr);
    be.force_fault(c, c.vms[0].name, 500);
    CHECK(be.poll(c, c.vms[0].name, 900) == VmState::Error);
    CHECK(c.vms[0].lastpoll == 900);
    CHECK(c.vms[0].last_state_change == 500);
}

}  // TEST_SUITE
