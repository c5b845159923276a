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

#include "cloudsched/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "cloudsched/errors.hpp"
#include "cloudsched/rng.hpp"

namespace cloudsched {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long parse_int(const IniFile& ini, const IniEntry& e, long min_value) {
    try {
        std::size_t pos = 0;
        long v = std::stol(trim(e.value), &pos);
        if (pos != trim(e.value).size()) throw std::invalid_argument("trailing");
        if (v < min_value) {
            throw ConfigError(ini.path, e.line,
                              e.key + " must be >= " + std::to_string(min_value));
        }
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(ini.path, e.line, e.key + " is not an integer: '" + e.value + "'");
    }
}

double parse_probability(const IniFile& ini, const IniEntry& e) {
    try {
        double v = std::stod(trim(e.value));
        if (v < 0.0 || v > 1.0) {
            throw ConfigError(ini.path, e.line, e.key + " must be in [0,1]");
        }
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(ini.path, e.line, e.key + " is not a number: '" + e.value + "'");
    }
}

Millis parse_dur(const IniFile& ini, const IniEntry& e) {
    try {
        return parse_duration(trim(e.value));
    } catch (const std::exception& ex) {
        throw ConfigError(ini.path, e.line, std::string(e.key) + ": " + ex.what());
    }
}

}  // namespace

const IniEntry* IniSection::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

std::string IniSection::get(const std::string& key, const std::string& fallback) const {
    const IniEntry* e = find(key);
    return e ? e->value : fallback;
}

const IniSection* IniFile::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

IniFile parse_ini(const std::string& text, const std::string& path) {
    IniFile file;
    file.path = path;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    IniSection* current = nullptr;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(path, line_no, "unterminated section header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw ConfigError(path, line_no, "empty section name");
            file.sections.push_back({name, line_no, {}});
            current = &file.sections.back();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(path, line_no, "expected key = value");
        if (!current) throw ConfigError(path, line_no, "key outside of any [section]");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(path, line_no, "empty key");
        current->entries.push_back({key, trim(line.substr(eq + 1)), line_no});
    }
    return file;
}

IniFile load_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ini(buf.str(), path);
}

std::string to_string(RebalanceMode m) {
    return m == RebalanceMode::Graceful ? "graceful" : "kill";
}

RebalanceMode rebalance_mode_from_string(const std::string& s) {
    if (s == "graceful") return RebalanceMode::Graceful;
    if (s == "kill") return RebalanceMode::Kill;
    throw Error("invalid rebalance_mode: '" + s + "'");
}

GeneralConfig parse_general_config(const IniFile& ini) {
    GeneralConfig cfg;
    for (const auto& sec : ini.sections) {
        if (sec.name == "scheduler") {
            for (const auto& e : sec.entries) {
                if (e.key == "rebalance_mode") {
                    try {
                        cfg.scheduler.rebalance_mode = rebalance_mode_from_string(e.value);
                    } catch (const std::exception& ex) {
                        throw ConfigError(ini.path, e.line, ex.what());
                    }
                } else if (e.key == "poll_interval") {
                    cfg.scheduler.poll_interval = parse_dur(ini, e);
                } else if (e.key == "schedule_interval") {
                    cfg.scheduler.schedule_interval = parse_dur(ini, e);
                } else if (e.key == "cleanup_interval") {
                    cfg.scheduler.cleanup_interval = parse_dur(ini, e);
                } else if (e.key == "error_threshold") {
                    cfg.scheduler.error_threshold = static_cast<int>(parse_int(ini, e, 1));
                } else if (e.key == "boot_timeout") {
                    cfg.scheduler.boot_timeout = parse_dur(ini, e);
                } else if (e.key == "drain_timeout") {
                    if (e.value == "none") {
                        cfg.scheduler.drain_timeout.reset();
                    } else {
                        cfg.scheduler.drain_timeout = parse_dur(ini, e);
                    }
                } else if (e.key == "persist_on_shutdown") {
                    cfg.scheduler.persist_on_shutdown = (e.value == "true" || e.value == "yes");
                } else if (e.key == "default_job_duration") {
                    cfg.default_job_duration = parse_dur(ini, e);
                } else if (e.key == "persistence_path") {
                    cfg.persistence_path = e.value;
                } else {
                    throw ConfigError(ini.path, e.line, "unknown scheduler key '" + e.key + "'");
                }
            }
        } else if (sec.name == "ipc") {
            for (const auto& e : sec.entries) {
                if (e.key == "socket") {
                    cfg.ipc_socket = e.value;
                } else {
                    throw ConfigError(ini.path, e.line, "unknown ipc key '" + e.key + "'");
                }
            }
        } else {
            throw ConfigError(ini.path, sec.line, "unknown section [" + sec.name + "]");
        }
    }
    if (cfg.scheduler.poll_interval <= 0 || cfg.scheduler.schedule_interval <= 0 ||
        cfg.scheduler.cleanup_interval <= 0) {
        throw ConfigError(ini.path, "intervals must be positive");
    }
    return cfg;
}

GeneralConfig load_general_config(const std::string& path) {
    return parse_general_config(load_ini(path));
}

CloudDecl parse_cluster_section(const IniFile& ini, const IniSection& sec) {
    CloudDecl decl;
    Cluster& c = decl.cluster;

    std::istringstream hdr(sec.name);
    std::string kw;
    hdr >> kw >> c.name;
    if (c.name.empty()) throw ConfigError(ini.path, sec.line, "cluster section needs a name");

    bool have_slots = false;
    for (const auto& e : sec.entries) {
        try {
            if (e.key == "host") {
                c.host = e.value;
            } else if (e.key == "cloud_type") {
                c.cloud_type = cloud_type_from_string(e.value);
            } else if (e.key == "memory") {
                c.memory_mb = static_cast<int>(parse_int(ini, e, 0));
            } else if (e.key == "cpu_archs") {
                for (const auto& a : split_list(e.value)) c.cpu_archs.insert(cpu_arch_from_string(a));
            } else if (e.key == "networks") {
                for (const auto& n : split_list(e.value)) c.networks.insert(network_from_string(n));
            } else if (e.key == "vm_slots") {
                c.vm_slots = static_cast<int>(parse_int(ini, e, 0));
                have_slots = true;
            } else if (e.key == "cpu_cores") {
                c.cpu_cores = static_cast<int>(parse_int(ini, e, 0));
            } else if (e.key == "storage") {
                c.storage_gb = static_cast<int>(parse_int(ini, e, 0));
            } else if (e.key == "boot_latency") {
                std::string v = trim(e.value);
                auto dots = v.find("..");
                if (dots == std::string::npos) {
                    decl.sim.boot_latency_min = decl.sim.boot_latency_max = parse_duration(v);
                } else {
                    decl.sim.boot_latency_min = parse_duration(trim(v.substr(0, dots)));
                    decl.sim.boot_latency_max = parse_duration(trim(v.substr(dots + 2)));
                    if (decl.sim.boot_latency_max < decl.sim.boot_latency_min) {
                        throw ConfigError(ini.path, e.line, "boot_latency range is inverted");
                    }
                }
            } else if (e.key == "fault_rate") {
                decl.sim.fault_rate = parse_probability(ini, e);
            } else if (e.key == "boot_failure_rate") {
                decl.sim.boot_failure_rate = parse_probability(ini, e);
            } else if (e.key == "seed") {
                decl.sim.rng_seed = static_cast<std::uint64_t>(parse_int(ini, e, 0));
            } else {
                throw ConfigError(ini.path, e.line, "unknown cluster key '" + e.key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            throw ConfigError(ini.path, e.line, std::string(e.key) + ": " + ex.what());
        }
    }
    if (c.host.empty()) c.host = c.name + ".cloud";
    if (!have_slots) throw ConfigError(ini.path, sec.line, "cluster " + c.name + " needs vm_slots");
    if (c.cpu_archs.empty()) c.cpu_archs = {CpuArch::X86, CpuArch::X86_64};
    if (c.networks.empty()) c.networks = {NetworkType::Private, NetworkType::Public};
    if (decl.sim.rng_seed == 0) decl.sim.rng_seed = hash_str(c.name);
    return decl;
}

std::vector<CloudDecl> parse_clouds_config(const IniFile& ini) {
    std::vector<CloudDecl> decls;
    std::set<std::string> names;
    for (const auto& sec : ini.sections) {
        if (sec.name.rfind("cluster", 0) != 0) {
            throw ConfigError(ini.path, sec.line, "unknown section [" + sec.name + "]");
        }
        CloudDecl d = parse_cluster_section(ini, sec);
        if (!names.insert(d.cluster.name).second) {
            throw ConfigError(ini.path, sec.line, "duplicate cluster name " + d.cluster.name);
        }
        decls.push_back(std::move(d));
    }
    return decls;
}

std::vector<CloudDecl> load_clouds_config(const std::string& path) {
    return parse_clouds_config(load_ini(path));
}

std::vector<std::string> apply_cloud_update(ResourcePool& pool,
                                            const std::vector<CloudDecl>& decls) {
    std::vector<std::string> changes;
    std::set<std::string> declared;
    for (const auto& d : decls) {
        declared.insert(d.cluster.name);
        if (Cluster* existing = pool.find(d.cluster.name)) {
            Cluster updated = d.cluster;
            updated.vms = existing->vms;
            if (updated != *existing) {
                *existing = std::move(updated);
                changes.push_back("updated cluster " + d.cluster.name);
            }
        } else {
            pool.clusters.push_back(d.cluster);
            changes.push_back("added cluster " + d.cluster.name);
        }
    }
    for (auto& c : pool.clusters) {
        // Undeclared clusters stop accepting boots but keep their live VMs
        // (vm_slots may never drop below the live count).
        const int live = static_cast<int>(c.vms.size());
        if (!declared.count(c.name) && c.vm_slots != live) {
            c.vm_slots = live;
            changes.push_back("draining removed cluster " + c.name);
        }
    }
    std::erase_if(pool.clusters, [&](const Cluster& c) {
        return !declared.count(c.name) && c.vms.empty();
    });
    return changes;
}

}  // namespace cloudsched
