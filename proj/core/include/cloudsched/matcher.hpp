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

#include <string>
#include <vector>

#include "cloudsched/backend.hpp"
#include "cloudsched/domain.hpp"

namespace cloudsched {

// memory/cpu_cores/storage are per-VM maxima, not depleting pools; only
// vm_slots depletes as VMs boot. `extra_pending` counts boots already
// planned against the cluster this cycle (and kills as negative).

/// True iff the cluster can host the job's VM right now: arch and network
/// offered, per-VM memory/storage/cores within the cluster maxima, a free
/// slot, and the image locator the cluster's cloud type needs is present.
bool fits(const Job& job, const Cluster& cluster, int extra_pending = 0);

/// fits() for a replacement boot described by an existing VM's spec.
bool fits_spec(const VmSpec& spec, const Cluster& cluster, int extra_pending = 0);

/// All clusters where fits() holds, in config-file order (first-fit
/// placement takes the head).
std::vector<std::string> candidates(const Job& job, const ResourcePool& pool);

}  // namespace cloudsched
