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

#include "cloudsched/matcher.hpp"

namespace cloudsched {

ImageLocatorKind image_locator_kind(CloudType type) {
    return type == CloudType::Ec2 ? ImageLocatorKind::Ami : ImageLocatorKind::Url;
}

VmSpec VmSpec::from_job(const Job& job, CloudType target) {
    VmSpec s;
    s.vmtype = job.vmtype;
    s.image = image_locator_kind(target) == ImageLocatorKind::Ami ? job.vm_ami : job.vm_loc;
    s.network = job.vm_network;
    s.cpuarch = job.vm_cpu_arch;
    s.memory_mb = job.vm_mem;
    s.cpu_cores = job.vm_cpu_cores;
    s.storage_gb = job.vm_storage;
    s.owner = job.user;
    return s;
}

VmSpec VmSpec::from_record(const VmRecord& vm) {
    VmSpec s;
    s.vmtype = vm.vmtype;
    s.image = vm.image;
    s.network = vm.network;
    s.cpuarch = vm.cpuarch;
    s.memory_mb = vm.memory_mb;
    s.cpu_cores = vm.cpu_cores;
    s.storage_gb = vm.storage_gb;
    s.owner = vm.owner;
    return s;
}

namespace {

bool capacity_ok(const Cluster& c, NetworkType net, CpuArch arch, int mem, int cores,
                 int storage, int extra_pending) {
    return c.cpu_archs.count(arch) && c.networks.count(net) && mem <= c.memory_mb &&
           storage <= c.storage_gb && cores <= c.cpu_cores &&
           static_cast<int>(c.vms.size()) + extra_pending < c.vm_slots;
}

}  // namespace

bool fits(const Job& job, const Cluster& cluster, int extra_pending) {
    const std::string& locator = image_locator_kind(cluster.cloud_type) == ImageLocatorKind::Ami
                                     ? job.vm_ami
                                     : job.vm_loc;
    if (locator.empty()) return false;
    return capacity_ok(cluster, job.vm_network, job.vm_cpu_arch, job.vm_mem,
                       job.vm_cpu_cores, job.vm_storage, extra_pending);
}

bool fits_spec(const VmSpec& spec, const Cluster& cluster, int extra_pending) {
    if (spec.image.empty()) return false;
    return capacity_ok(cluster, spec.network, spec.cpuarch, spec.memory_mb, spec.cpu_cores,
                       spec.storage_gb, extra_pending);
}

std::vector<std::string> candidates(const Job& job, const ResourcePool& pool) {
    std::vector<std::string> out;
    for (const auto& c : pool.clusters) {
        if (fits(job, c)) out.push_back(c.name);
    }
    return out;
}

}  // namespace cloudsched
