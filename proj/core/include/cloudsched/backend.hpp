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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cloudsched/domain.hpp"

namespace cloudsched {

/// Everything a backend needs to boot one VM.
struct VmSpec {
    std::string vmtype;
    std::string image;
    NetworkType network = NetworkType::Private;
    CpuArch cpuarch = CpuArch::X86;
    int memory_mb = 0;
    int cpu_cores = 1;
    int storage_gb = 0;
    std::string owner;

    static VmSpec from_job(const Job& job, CloudType target);
    static VmSpec from_record(const VmRecord& vm);
};

enum class ImageLocatorKind { Url, Ami };

/// Which locator attribute a cloud of this type consumes (EC2-style clouds
/// take an AMI id, everything else a URL).
ImageLocatorKind image_locator_kind(CloudType type);

/// The seam where real IaaS clients would plug in. Calls mutate the cluster's
/// VM list directly; `cluster` is always the cluster this backend serves.
class CloudBackend {
public:
    virtual ~CloudBackend() = default;

    /// Adds a Starting VmRecord and returns its cluster-specific id.
    /// Throws BootRejected when the cluster is full or the boot fails.
    virtual std::string boot(Cluster& cluster, const VmSpec& spec, Millis now) = 0;

    /// Removes the VM and cancels anything pending for it. Throws UnknownVm.
    virtual void shutdown(Cluster& cluster, const std::string& vm_name) = 0;

    /// Returns the current state and refreshes lastpoll. Throws UnknownVm
    /// when the cloud has lost the VM (callers treat that as death).
    virtual VmState poll(Cluster& cluster, const std::string& vm_name, Millis now) = 0;

    /// Polls every VM on the cluster and returns the names the cloud no
    /// longer knows. The default walks poll(); batch-capable backends
    /// override it.
    virtual std::vector<std::string> poll_all(Cluster& cluster, Millis now);
};

/// Cluster name → backend. Only simulated clusters get a backend here;
/// boots on anything else fail.
using BackendMap = std::map<std::string, std::unique_ptr<CloudBackend>>;

}  // namespace cloudsched
