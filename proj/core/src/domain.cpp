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

#include "cloudsched/domain.hpp"

#include <algorithm>

namespace cloudsched {

std::string to_string(CloudType v) {
    switch (v) {
        case CloudType::Simulated: return "simulated";
        case CloudType::Nimbus: return "nimbus";
        case CloudType::Ec2: return "ec2";
    }
    return "?";
}

std::string to_string(VmState v) {
    switch (v) {
        case VmState::Starting: return "Starting";
        case VmState::Running: return "Running";
        case VmState::Error: return "Error";
    }
    return "?";
}

std::string to_string(CpuArch v) {
    return v == CpuArch::X86 ? "x86" : "x86_64";
}

std::string to_string(NetworkType v) {
    return v == NetworkType::Private ? "private" : "public";
}

std::string to_string(SchedState v) {
    return v == SchedState::New ? "New" : "Scheduled";
}

std::string to_string(QueueState v) {
    switch (v) {
        case QueueState::Queued: return "Queued";
        case QueueState::Held: return "Held";
        case QueueState::Dispatched: return "Dispatched";
        case QueueState::Completed: return "Completed";
        case QueueState::Removed: return "Removed";
    }
    return "?";
}

std::string to_string(VmEvent e) {
    switch (e) {
        case VmEvent::BootComplete: return "BootComplete";
        case VmEvent::Fault: return "Fault";
        case VmEvent::PollUpdate: return "PollUpdate";
    }
    return "?";
}

namespace {
[[noreturn]] void bad_enum(const std::string& what, const std::string& s) {
    throw Error("invalid " + what + ": '" + s + "'");
}
}  // namespace

CloudType cloud_type_from_string(const std::string& s) {
    if (s == "simulated") return CloudType::Simulated;
    if (s == "nimbus") return CloudType::Nimbus;
    if (s == "ec2") return CloudType::Ec2;
    bad_enum("cloud_type", s);
}

VmState vm_state_from_string(const std::string& s) {
    if (s == "Starting") return VmState::Starting;
    if (s == "Running") return VmState::Running;
    if (s == "Error") return VmState::Error;
    bad_enum("vm state", s);
}

CpuArch cpu_arch_from_string(const std::string& s) {
    if (s == "x86") return CpuArch::X86;
    if (s == "x86_64") return CpuArch::X86_64;
    bad_enum("cpu arch", s);
}

NetworkType network_from_string(const std::string& s) {
    if (s == "private") return NetworkType::Private;
    if (s == "public") return NetworkType::Public;
    bad_enum("network", s);
}

SchedState sched_state_from_string(const std::string& s) {
    if (s == "New") return SchedState::New;
    if (s == "Scheduled") return SchedState::Scheduled;
    bad_enum("sched state", s);
}

QueueState queue_state_from_string(const std::string& s) {
    if (s == "Queued") return QueueState::Queued;
    if (s == "Held") return QueueState::Held;
    if (s == "Dispatched") return QueueState::Dispatched;
    if (s == "Completed") return QueueState::Completed;
    if (s == "Removed") return QueueState::Removed;
    bad_enum("queue state", s);
}

const VmRecord* Cluster::find_vm(const std::string& vm_name) const {
    auto it = std::find_if(vms.begin(), vms.end(),
                           [&](const VmRecord& v) { return v.name == vm_name; });
    return it == vms.end() ? nullptr : &*it;
}

VmRecord* Cluster::find_vm(const std::string& vm_name) {
    auto it = std::find_if(vms.begin(), vms.end(),
                           [&](const VmRecord& v) { return v.name == vm_name; });
    return it == vms.end() ? nullptr : &*it;
}

Cluster* ResourcePool::find(const std::string& name) {
    for (auto& c : clusters)
        if (c.name == name) return &c;
    return nullptr;
}

const Cluster* ResourcePool::find(const std::string& name) const {
    for (const auto& c : clusters)
        if (c.name == name) return &c;
    return nullptr;
}

int ResourcePool::total_slots() const {
    int n = 0;
    for (const auto& c : clusters) n += c.vm_slots;
    return n;
}

int ResourcePool::total_vms() const {
    int n = 0;
    for (const auto& c : clusters) n += static_cast<int>(c.vms.size());
    return n;
}

const VmRecord* ResourcePool::find_vm(const std::string& vm_name) const {
    for (const auto& c : clusters)
        if (const VmRecord* vm = c.find_vm(vm_name)) return vm;
    return nullptr;
}

const Job* JobPool::find(const std::string& id) const {
    for (const auto& j : new_list)
        if (j.global_job_id == id) return &j;
    for (const auto& j : scheduled_list)
        if (j.global_job_id == id) return &j;
    return nullptr;
}

VmRecord transition_vm(VmRecord vm, VmEvent event, Millis now) {
    switch (event) {
        case VmEvent::PollUpdate:
            // A poll that reports an unchanged state refreshes lastpoll only.
            vm.lastpoll = now;
            return vm;
        case VmEvent::BootComplete:
            if (vm.vmstate != VmState::Starting) {
                throw IllegalTransition(to_string(vm.vmstate), to_string(event));
            }
            vm.vmstate = VmState::Running;
            vm.last_state_change = now;
            vm.lastpoll = now;
            return vm;
        case VmEvent::Fault:
            if (vm.vmstate == VmState::Error) {
                throw IllegalTransition(to_string(vm.vmstate), to_string(event));
            }
            vm.vmstate = VmState::Error;
            vm.error_count += 1;
            vm.last_state_change = now;
            vm.lastpoll = now;
            return vm;
    }
    throw IllegalTransition(to_string(vm.vmstate), "?");
}

}  // namespace cloudsched
