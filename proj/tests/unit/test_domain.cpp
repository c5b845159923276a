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

#include "cloudsched/domain.hpp"
#include "cloudsched/rng.hpp"
#include "support/builders.hpp"

using namespace cloudsched;

TEST_SUITE("domain") {

TEST_CASE("boot completion moves Starting to Running") {
    VmRecord vm = test::make_vm("v1", "t", "alice", "c1.cloud", VmState::Starting);
    VmRecord out = transition_vm(vm, VmEvent::BootComplete, 5000);
    CHECK(out.vmstate == VmState::Running);
    CHECK(out.last_state_change == 5000);
    CHECK(out.lastpoll == 5000);
    CHECK(out.error_count == 0);
}

TEST_CASE("fault from Running sets Error and bumps errorcount") {
    VmRecord vm = test::make_vm("v1", "t", "alice", "c1.cloud", VmState::Running);
    CHECK(vm.error_count == 0);
    VmRecord out = transition_vm(vm, VmEvent::Fault, 9000);
    CHECK(out.vmstate == VmState::Error);
    CHECK(out.error_count == 1);
}

TEST_CASE("no exit from Error") {
    VmRecord vm = test::make_vm("v1", "t", "alice", "c1.cloud", VmState::Error);
    CHECK_THROWS_AS(transition_vm(vm, VmEvent::BootComplete, 1), IllegalTransition);
    CHECK_THROWS_AS(transition_vm(vm, VmEvent::Fault, 1), IllegalTransition);
}

TEST_CASE("boot completion is illegal from Running") {
    VmRecord vm = test::make_vm("v1", "t", "alice", "c1.cloud", VmState::Running);
    CHECK_THROWS_AS(transition_vm(vm, VmEvent::BootComplete, 1), IllegalTransition);
}

TEST_CASE("poll update refreshes lastpoll only") {
    VmRecord vm = test::make_vm("v1", "t", "alice", "c1.cloud", VmState::Running);
    vm.last_state_change = 100;
    vm.lastpoll = 100;
    VmRecord out = transition_vm(vm, VmEvent::PollUpdate, 900);
    CHECK(out.lastpoll == 900);
    CHECK(out.last_state_change == 100);
    CHECK(out.vmstate == VmState::Running);
}

TEST_CASE("a VM never re-enters an earlier state") {
    // Random event storms: whatever succeeds, the state index only moves
    // forward (Starting=0, Running=1, Error=2) and errorcount never drops.
    DetRng rng(0xD0D0);
    for (int trial = 0; trial < 200; ++trial) {
        VmRecord vm = test::make_vm("v", "t", "u", "h", VmState::Starting);
        int last_rank = 0;
        int last_errors = 0;
        Millis now = 0;
        for (int step = 0; step < 30; ++step) {
            now += rng.next_int(1, 1000);
            auto ev = static_cast<VmEvent>(rng.next_int(0, 2));
            try {
                vm = transition_vm(vm, ev, now);
            } catch (const IllegalTransition&) {
                continue;
            }
            const int rank = vm.vmstate == VmState::Starting ? 0
                             : vm.vmstate == VmState::Running ? 1
                                                              : 2;
            CHECK(rank >= last_rank);
            CHECK(vm.error_count >= last_errors);
            CHECK(vm.last_state_change <= vm.lastpoll);
            last_rank = rank;
            last_errors = vm.error_count;
        }
    }
}

TEST_CASE("clock modes") {
    Clock c = Clock::virtual_clock();
    CHECK(c.now() == 0);
    c.advance_by(250);
    CHECK(c.now() == 250);
    c.advance_to(100);  // never backwards
    CHECK(c.now() == 250);

    Clock r = Clock::real();
    CHECK_THROWS(r.advance_to(1));
    Millis a = r.now();
    Millis b = r.now();
    CHECK(b >= a);
}

TEST_CASE("duration parsing") {
    CHECK(parse_duration("90s") == 90'000);
    CHECK(parse_duration("7h") == 7 * kMillisPerHour);
    CHECK(parse_duration("5m") == 5 * kMillisPerMinute);
    CHECK(parse_duration("250ms") == 250);
    CHECK(parse_duration("42") == 42'000);
    CHECK_THROWS(parse_duration("7d"));
    CHECK_THROWS(parse_duration("-3s"));
    CHECK_THROWS(parse_duration("fast"));
    CHECK(format_duration(7 * kMillisPerHour) == "7h");
    CHECK(format_duration(90'000) == "90s");
}

}  // TEST_SUITE
