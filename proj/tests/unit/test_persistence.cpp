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
#include "support/builders.hpp"

using namespace cloudsched;

namespace {

SchedulerState sample_state() {
    SchedulerState st;
    st.clock = Clock::virtual_clock(123'000);
    Cluster c = test::make_cluster("uvic", 8);
    c.vms.push_back(test::make_vm("uvic-vm-000001", "w", "alice", c.host));
    st.pool.clusters.push_back(c);

    Job j = test::make_job("1.0", "alice", "w");
    j.sched_state = SchedState::Scheduled;
    j.queue_state = QueueState::Dispatched;
    st.job_pool.scheduled_list.push_back(j);
    st.job_pool.new_list.push_back(test::make_job("1.1", "alice", "w"));

    st.draining = {"uvic-vm-000001"};
    st.drain_marked_at["uvic-vm-000001"] = 100'000;
    st.rebalance_holds["1.1"] = "w";
    st.submit_times["1.0"] = 10;
    st.submit_times["1.1"] = 10;
    return st;
}

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("empty state round trips with a version header") {
    SchedulerState st;
    std::string doc = snapshot(st);
    CHECK(doc.find("\"format\"") != std::string::npos);
    CHECK(doc.find("cloudsched-state") != std::string::npos);
    CHECK(doc.find("\"version\"") != std::string::npos);
    SchedulerState back = restore(doc);
    CHECK(state_equal(back, st));
    CHECK(back.pool.clusters.empty());
    CHECK(back.job_pool.size() == 0);
}

TEST_CASE("restore(snapshot(s)) == s") {
    SchedulerState st = sample_state();
    CHECK(state_equal(restore(snapshot(st)), st));
}

TEST_CASE("identical states produce byte-identical documents") {
    CHECK(snapshot(sample_state()) == snapshot(sample_state()));
}

TEST_CASE("truncated and malformed documents are rejected with a position") {
    SchedulerState st = sample_state();
    std::string doc = snapshot(st);
    CHECK_THROWS_AS(restore(doc.substr(0, doc.size() / 2)), CorruptSnapshot);
    CHECK_THROWS_AS(restore("{}"), CorruptSnapshot);
    CHECK_THROWS_AS(restore("not json at all"), CorruptSnapshot);
    CHECK_THROWS_AS(restore("[1,2,3]"), CorruptSnapshot);
}

TEST_CASE("unsupported version is its own failure") {
    std::string doc = snapshot(SchedulerState{});
    auto pos = doc.find("\"version\": 1");
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 12, "\"version\": 9");
    CHECK_THROWS_AS(restore(doc), UnsupportedVersion);
}

TEST_CASE("semantic validation: slots and duplicate names") {
    SchedulerState st = sample_state();
    st.pool.clusters[0].vm_slots = 0;  // fewer slots than live VMs
    CHECK_THROWS_AS(restore(snapshot(st)), CorruptSnapshot);

    st = sample_state();
    st.pool.clusters.push_back(st.pool.clusters[0]);
    CHECK_THROWS_AS(restore(snapshot(st)), CorruptSnapshot);
}

TEST_CASE("file round trip is atomic") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "cs-persist-test.json").string();
    SchedulerState st = sample_state();
    save_snapshot_file(st, path);
    CHECK_FALSE(fs::exists(path + ".tmp"));
    CHECK(state_equal(load_snapshot_file(path), st));

    // overwrite keeps the old file intact until the rename
    save_snapshot_file(SchedulerState{}, path);
    CHECK(load_snapshot_file(path).pool.clusters.empty());
    fs::remove(path);

    CHECK_THROWS_AS(load_snapshot_file("/nonexistent/state.json"), CorruptSnapshot);
    CHECK_THROWS_AS(save_snapshot_file(st, "/nonexistent-dir/state.json"), WriteFailure);
}

}  // TEST_SUITE
