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

#include "cloudsched/sim_cloud.hpp"

#include <algorithm>
#include <cstdio>

#include "cloudsched/errors.hpp"
#include "cloudsched/rng.hpp"

namespace cloudsched {

std::vector<std::string> CloudBackend::poll_all(Cluster& cluster, Millis now) {
    std::vector<std::string> vanished;
    std::vector<std::string> names;
    names.reserve(cluster.vms.size());
    for (const auto& vm : cluster.vms) names.push_back(vm.name);
    for (const auto& name : names) {
        try {
            poll(cluster, name, now);
        } catch (const UnknownVm&) {
            vanished.push_back(name);
        }
    }
    return vanished;
}

SimCloudBackend::SimCloudBackend(std::string cluster_name, SimCloudConfig cfg)
    : cluster_name_(std::move(cluster_name)), cfg_(cfg) {}

std::string SimCloudBackend::boot(Cluster& cluster, const VmSpec& spec, Millis now) {
    if (cluster.free_slots() <= 0) {
        throw BootRejected(cluster_name_ + ": no free VM slots");
    }
    // Per-boot stream so the roll and latency do not depend on other VMs.
    DetRng rng(mix(cfg_.rng_seed, mix(hash_str(cluster_name_), boot_counter_)));
    if (rng.chance(cfg_.boot_failure_rate)) {
        ++boot_counter_;
        throw BootRejected(cluster_name_ + ": boot request failed");
    }

    char seq[8];
    std::snprintf(seq, sizeof(seq), "%06llu",
                  static_cast<unsigned long long>(boot_counter_));
    ++boot_counter_;

    VmRecord vm;
    vm.name = cluster_name_ + "-vm-" + seq;
    vm.id = "sim-" + std::string(seq);
    vm.vmtype = spec.vmtype;
    vm.vmstate = VmState::Starting;
    vm.clusteraddr = cluster.host;
    vm.network = spec.network;
    vm.cpuarch = spec.cpuarch;
    vm.image = spec.image;
    vm.memory_mb = spec.memory_mb;
    vm.cpu_cores = spec.cpu_cores;
    vm.storage_gb = spec.storage_gb;
    vm.owner = spec.owner;

    // Caller timestamps: events are delivered against the shared clock.
    Millis latency = cfg_.boot_latency_min;
    if (cfg_.boot_latency_max > cfg_.boot_latency_min) {
        latency = rng.next_int(cfg_.boot_latency_min, cfg_.boot_latency_max);
    }
    pending_.push_back({now + latency, vm.name});
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const PendingBoot& a, const PendingBoot& b) { return a.due < b.due; });

    vm.lastpoll = now;
    vm.last_state_change = now;
    cluster.vms.push_back(std::move(vm));
    return cluster.vms.back().id;
}

void SimCloudBackend::shutdown(Cluster& cluster, const std::string& vm_name) {
    auto it = std::find_if(cluster.vms.begin(), cluster.vms.end(),
                           [&](const VmRecord& v) { return v.name == vm_name; });
    if (it == cluster.vms.end()) throw UnknownVm(vm_name);
    std::erase_if(pending_, [&](const PendingBoot& p) { return p.vm_name == vm_name; });
    cluster.vms.erase(it);
}

VmState SimCloudBackend::poll(Cluster& cluster, const std::string& vm_name, Millis now) {
    VmRecord* vm = cluster.find_vm(vm_name);
    if (!vm) throw UnknownVm(vm_name);
    *vm = transition_vm(*vm, VmEvent::PollUpdate, now);
    return vm->vmstate;
}

std::vector<std::string> SimCloudBackend::poll_all(Cluster& cluster, Millis now) {
    // The record list is the cloud's own truth here, so a single pass
    // refreshes lastpoll and nothing can be missing.
    for (auto& vm : cluster.vms) vm.lastpoll = now;
    return {};
}

void SimCloudBackend::advance_to(Cluster& cluster, Millis now, const AdvertiseFn& on_advertise) {
    std::vector<PendingBoot> due;
    std::erase_if(pending_, [&](const PendingBoot& p) {
        if (p.due <= now) {
            due.push_back(p);
            return true;
        }
        return false;
    });
    for (const PendingBoot& p : due) {
        VmRecord* vm = cluster.find_vm(p.vm_name);
        if (!vm || vm->vmstate != VmState::Starting) continue;
        *vm = transition_vm(*vm, VmEvent::BootComplete, p.due);
        vm->hostname = vm->name + "." + cluster.host;
        if (on_advertise) on_advertise({vm->name, vm->vmtype, p.due});
    }
}

void SimCloudBackend::fault_vm(VmRecord& vm, Millis now) {
    vm = transition_vm(vm, VmEvent::Fault, now);
    // A VM that faults while Starting must never advertise.
    std::erase_if(pending_, [&](const PendingBoot& p) { return p.vm_name == vm.name; });
}

std::vector<std::string> SimCloudBackend::inject_faults(Cluster& cluster,
                                                        std::uint64_t cycle_index,
                                                        Millis now) {
    std::vector<std::string> faulted;
    if (cfg_.fault_rate <= 0.0) return faulted;
    for (VmRecord& vm : cluster.vms) {
        if (vm.vmstate == VmState::Error) continue;
        const std::uint64_t key = mix(cfg_.rng_seed, mix(hash_str(vm.name), cycle_index));
        if (to_unit_double(splitmix64(key)) < cfg_.fault_rate) {
            fault_vm(vm, now);
            faulted.push_back(vm.name);
        }
    }
    return faulted;
}

bool SimCloudBackend::force_fault(Cluster& cluster, const std::string& vm_name, Millis now) {
    VmRecord* vm = cluster.find_vm(vm_name);
    if (!vm || vm->vmstate == VmState::Error) return false;
    fault_vm(*vm, now);
    return true;
}

}  // namespace cloudsched
