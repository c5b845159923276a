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

#pragma once

#include <set>
#include <string>
#include <vector>

#include "cloudsched/clock.hpp"
#include "cloudsched/errors.hpp"

namespace cloudsched {

enum class CloudType { Simulated, Nimbus, Ec2 };
enum class VmState { Starting, Running, Error };
enum class CpuArch { X86, X86_64 };
enum class NetworkType { Private, Public };
enum class SchedState { New, Scheduled };
enum class QueueState { Queued, Held, Dispatched, Completed, Removed };

std::string to_string(CloudType v);
std::string to_string(VmState v);
std::string to_string(CpuArch v);
std::string to_string(NetworkType v);
std::string to_string(SchedState v);
std::string to_string(QueueState v);

CloudType cloud_type_from_string(const std::string& s);
VmState vm_state_from_string(const std::string& s);
CpuArch cpu_arch_from_string(const std::string& s);
NetworkType network_from_string(const std::string& s);
SchedState sched_state_from_string(const std::string& s);
QueueState queue_state_from_string(const std::string& s);

/// One VM instance under management. `owner` is the user whose demand caused
/// the boot; fair-share accounting needs the VM→user map.
struct VmRecord {
    std::string name;          // assigned at boot, unique across the pool
    std::string id;            // cluster-specific identifier
    std::string vmtype;
    VmState vmstate = VmState::Starting;
    std::string hostname;      // empty until Running
    std::string clusteraddr;   // host of the owning cluster
    NetworkType network = NetworkType::Private;
    CpuArch cpuarch = CpuArch::X86;
    std::string image;
    int memory_mb = 0;
    int cpu_cores = 1;
    int storage_gb = 0;
    int error_count = 0;
    Millis lastpoll = 0;
    Millis last_state_change = 0;
    std::string owner;

    bool operator==(const VmRecord&) const = default;
};

/// Static description of one cloud plus the live VM list.
struct Cluster {
    std::string name;
    std::string host;
    CloudType cloud_type = CloudType::Simulated;
    int memory_mb = 0;         // RAM available for a single VM
    std::set<CpuArch> cpu_archs;
    std::set<NetworkType> networks;
    int vm_slots = 0;          // max concurrent VMs; the only depleting dimension
    int cpu_cores = 0;         // max cores for a single VM
    int storage_gb = 0;        // scratch available for a single VM
    std::vector<VmRecord> vms;

    int free_slots() const { return vm_slots - static_cast<int>(vms.size()); }
    const VmRecord* find_vm(const std::string& vm_name) const;
    VmRecord* find_vm(const std::string& vm_name);

    bool operator==(const Cluster&) const = default;
};

/// One queued or scheduled unit of work with its VM requirements.
struct Job {
    std::string global_job_id;
    std::string user;
    int priority = 1;
    std::string vmtype;
    NetworkType vm_network = NetworkType::Private;
    CpuArch vm_cpu_arch = CpuArch::X86;
    std::string vm_name;       // image name (informational)
    std::string vm_loc;        // URL locator, may be empty
    std::string vm_ami;        // AMI-style locator, may be empty
    int vm_mem = 0;
    int vm_cpu_cores = 1;
    int vm_storage = 0;
    SchedState sched_state = SchedState::New;
    QueueState queue_state = QueueState::Queued;  // mirror of the queue's view

    bool operator==(const Job&) const = default;
};

struct ResourcePool {
    std::vector<Cluster> clusters;  // config-file order

    Cluster* find(const std::string& name);
    const Cluster* find(const std::string& name) const;
    int total_slots() const;
    int total_vms() const;
    const VmRecord* find_vm(const std::string& vm_name) const;

    bool operator==(const ResourcePool&) const = default;
};

/// The scheduler's view of the queue: jobs it has not yet arranged resources
/// for (new) and jobs whose VM has been requested or is running (scheduled).
struct JobPool {
    std::vector<Job> new_list;
    std::vector<Job> scheduled_list;

    const Job* find(const std::string& id) const;
    std::size_t size() const { return new_list.size() + scheduled_list.size(); }

    bool operator==(const JobPool&) const = default;
};

// --- VM lifecycle state machine ---

enum class VmEvent { BootComplete, Fault, PollUpdate };

std::string to_string(VmEvent e);

/// Applies `event` at time `now` and returns the updated record.
/// Legal transitions: Starting→Running (BootComplete), Starting/Running→Error
/// (Fault). PollUpdate refreshes lastpoll only and is valid in any state.
/// Throws IllegalTransition otherwise; there is no way out of Error.
VmRecord transition_vm(VmRecord vm, VmEvent event, Millis now);

}  // namespace cloudsched
