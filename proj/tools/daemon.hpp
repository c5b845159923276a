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

#include "cloudsched/config.hpp"
#include "cloudsched/scheduler.hpp"

namespace cloudsched {

/// Long-running real-clock mode behind `cloudsched run`: three periodic
/// loops plus the IPC endpoint. Returns the process exit code.
int run_daemon(const GeneralConfig& gcfg, const std::string& clouds_path);

/// Renders the status tables (per-cluster VMs, per-user queue/allocation)
/// from a state snapshot. Shared by `status` against a live daemon and
/// against a snapshot file.
std::string render_status(const SchedulerState& st);

}  // namespace cloudsched
