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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cloudsched/backend.hpp"
#include "cloudsched/clock.hpp"
#include "cloudsched/domain.hpp"

namespace cloudsched {

/// Simulation knobs for one cluster. boot_latency is fixed when
/// min == max, otherwise uniform over [min, max].
struct SimCloudConfig {
    Millis boot_latency_min = 0;
    Millis boot_latency_max = 0;
    double fault_rate = 0.0;          // per VM per scheduler cycle
    double boot_failure_rate = 0.0;   // per boot request
    std::uint64_t rng_seed = 0;

    bool operator==(const SimCloudConfig&) const = default;
};

/// Minimal advertisement payload (mirrors WorkerAd without pulling in the
/// queue header).
struct WorkerAdLike {
    std::string vm_name;
    std::string vmtype;
    Millis registered_at = 0;
};

/// Fully functional simulated IaaS cloud for one cluster: boots are
/// acknowledged immediately (VM in Starting) and complete after the
/// configured latency, at which point the VM advertises itself through
/// `on_advertise`. All randomness is derived from the seed, so identical
/// configs and call sequences produce identical traces. Nothing moves
/// between explicit advance_to() calls.
class SimCloudBackend : public CloudBackend {
public:
    using AdvertiseFn = std::function<void(const WorkerAdLike&)>;

    SimCloudBackend(std::string cluster_name, SimCloudConfig cfg);

    std::string boot(Cluster& cluster, const VmSpec& spec, Millis now) override;
    void shutdown(Cluster& cluster, const std::string& vm_name) override;
    VmState poll(Cluster& cluster, const std::string& vm_name, Millis now) override;
    std::vector<std::string> poll_all(Cluster& cluster, Millis now) override;

    /// Delivers every pending boot completion with due time <= now.
    void advance_to(Cluster& cluster, Millis now, const AdvertiseFn& on_advertise);

    /// Independent Fault roll for every live VM, keyed by
    /// (seed, vm name, cycle_index). Returns the names that faulted.
    std::vector<std::string> inject_faults(Cluster& cluster, std::uint64_t cycle_index,
                                           Millis now);

    /// Scripted fault for one VM (no-op if unknown or already Error).
    bool force_fault(Cluster& cluster, const std::string& vm_name, Millis now);

    const SimCloudConfig& config() const { return cfg_; }

private:
    struct PendingBoot {
        Millis due;
        std::string vm_name;
    };

    void fault_vm(VmRecord& vm, Millis now);

    std::string cluster_name_;
    SimCloudConfig cfg_;
    std::uint64_t boot_counter_ = 0;
    std::vector<PendingBoot> pending_;  // due-time order
};

}  // namespace cloudsched
