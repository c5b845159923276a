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

#include "cloudsched/scheduler.hpp"

namespace cloudsched {

// Snapshot format: versioned JSON with sorted keys and fixed indentation,
// so identical states serialize to identical bytes. Grammar in
// docs/snapshot-format.md.

inline constexpr int kSnapshotVersion = 1;
inline constexpr const char* kSnapshotFormat = "cloudsched-state";

/// Canonical document for a consistent state snapshot.
std::string snapshot(const SchedulerState& state);

/// Inverse of snapshot(). Throws CorruptSnapshot / UnsupportedVersion.
SchedulerState restore(const std::string& document);

/// Atomic write (temp file + rename). Throws WriteFailure.
void save_snapshot_file(const SchedulerState& state, const std::string& path);

SchedulerState load_snapshot_file(const std::string& path);

}  // namespace cloudsched
