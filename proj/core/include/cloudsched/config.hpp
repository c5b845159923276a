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
#include <optional>
#include <string>
#include <vector>

#include "cloudsched/clock.hpp"
#include "cloudsched/domain.hpp"
#include "cloudsched/sim_cloud.hpp"

namespace cloudsched {

// INI-style key=value files with [section] headers. Sections repeat (each
// [cluster ...] / [arrival] block is its own section) and keep file order.

struct IniEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct IniSection {
    std::string name;      // full header, e.g. "cluster uvic"
    std::size_t line = 0;
    std::vector<IniEntry> entries;

    const IniEntry* find(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback = {}) const;
};

struct IniFile {
    std::string path;  // for error messages
    std::vector<IniSection> sections;

    const IniSection* find(const std::string& name) const;
};

IniFile parse_ini(const std::string& text, const std::string& path);
IniFile load_ini(const std::string& path);

enum class RebalanceMode { Graceful, Kill };

std::string to_string(RebalanceMode m);
RebalanceMode rebalance_mode_from_string(const std::string& s);

/// Scheduler behavior knobs ([scheduler] section of the general config).
struct SchedulerConfig {
    RebalanceMode rebalance_mode = RebalanceMode::Graceful;
    Millis poll_interval = 30 * kMillisPerSecond;
    Millis schedule_interval = 60 * kMillisPerSecond;
    Millis cleanup_interval = 60 * kMillisPerSecond;
    int error_threshold = 1;
    Millis boot_timeout = 15 * kMillisPerMinute;
    std::optional<Millis> drain_timeout;  // nullopt = wait forever
    bool persist_on_shutdown = false;

    bool operator==(const SchedulerConfig&) const = default;
};

/// Full general config: scheduler knobs plus daemon paths.
struct GeneralConfig {
    SchedulerConfig scheduler;
    std::string persistence_path = "cloudsched-state.json";
    std::string ipc_socket = "/tmp/cloudsched.sock";
    Millis default_job_duration = kMillisPerHour;
};

/// One cluster block from the cloud resources config: the static Table-1
/// fields plus the embedded simulation knobs.
struct CloudDecl {
    Cluster cluster;       // vms empty
    SimCloudConfig sim;
};

GeneralConfig load_general_config(const std::string& path);
GeneralConfig parse_general_config(const IniFile& ini);

std::vector<CloudDecl> load_clouds_config(const std::string& path);
std::vector<CloudDecl> parse_clouds_config(const IniFile& ini);

/// Parses one [cluster NAME] section (shared with scenario files).
CloudDecl parse_cluster_section(const IniFile& ini, const IniSection& sec);

/// Applies an updated clouds config to a live pool: static fields of
/// existing clusters are refreshed, new clusters appended, removed clusters
/// dropped once they have no VMs (until then vm_slots is forced to 0 so
/// they only drain). Returns a human-readable change summary.
std::vector<std::string> apply_cloud_update(ResourcePool& pool,
                                            const std::vector<CloudDecl>& decls);

}  // namespace cloudsched
