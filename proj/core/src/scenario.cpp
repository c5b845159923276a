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

#include "cloudsched/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cloudsched/errors.hpp"
#include "cloudsched/rng.hpp"

namespace cloudsched {

namespace {

Millis dur_or_throw(const IniFile& ini, const IniSection& sec, const std::string& key,
                    Millis fallback, bool required = false) {
    const IniEntry* e = sec.find(key);
    if (!e) {
        if (required) {
            throw ScenarioError(ini.path + ": [" + sec.name + "] needs " + key);
        }
        return fallback;
    }
    try {
        return parse_duration(e->value);
    } catch (const std::exception& ex) {
        throw ScenarioError(ini.path + ":" + std::to_string(e->line) + ": " + ex.what());
    }
}

long int_or_throw(const IniFile& ini, const IniSection& sec, const std::string& key,
                  long fallback, long min_value) {
    const IniEntry* e = sec.find(key);
    if (!e) return fallback;
    try {
        long v = std::stol(e->value);
        if (v < min_value) throw std::invalid_argument("must be >= " + std::to_string(min_value));
        return v;
    } catch (const std::exception& ex) {
        throw ScenarioError(ini.path + ":" + std::to_string(e->line) + ": " + key + ": " +
                            ex.what());
    }
}

std::string dirname_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

Arrival parse_arrival(const IniFile& ini, const IniSection& sec, const std::string& base_dir) {
    Arrival a;
    a.time = dur_or_throw(ini, sec, "time", 0);
    a.user = sec.get("user");
    if (a.user.empty()) throw ScenarioError(ini.path + ": [arrival] needs user");
    a.count = static_cast<int>(int_or_throw(ini, sec, "count", 1, 1));
    a.duration = dur_or_throw(ini, sec, "duration", 0, /*required=*/true);

    a.submit_file = sec.get("submit_file");
    if (!a.submit_file.empty()) {
        std::string full = a.submit_file;
        if (full.front() != '/') full = base_dir + "/" + full;
        std::ifstream in(full);
        if (!in) throw ScenarioError(ini.path + ": cannot open submit file " + full);
        std::ostringstream buf;
        buf << in.rdbuf();
        a.submit_text = buf.str();
        return a;
    }

    // Inline attributes → a synthetic submit description.
    const std::string vmtype = sec.get("vmtype");
    const std::string image = sec.get("image");
    if (vmtype.empty() || image.empty()) {
        throw ScenarioError(ini.path + ": [arrival] needs either submit_file or vmtype+image");
    }
    std::ostringstream sub;
    sub << "+VMType = \"" << vmtype << "\"\n";
    const bool ami = image.rfind("ami-", 0) == 0;
    sub << (ami ? "+VMAMI" : "+VMLoc") << " = \"" << image << "\"\n";
    if (const IniEntry* e = sec.find("memory")) sub << "+VMMem = \"" << e->value << "\"\n";
    if (const IniEntry* e = sec.find("cores")) sub << "+VMCPUCores = \"" << e->value << "\"\n";
    if (const IniEntry* e = sec.find("storage")) sub << "+VMStorage = \"" << e->value << "\"\n";
    if (const IniEntry* e = sec.find("arch")) sub << "+VMCPUArch = \"" << e->value << "\"\n";
    if (const IniEntry* e = sec.find("network")) sub << "+VMNetwork = \"" << e->value << "\"\n";
    if (const IniEntry* e = sec.find("priority")) sub << "priority = " << e->value << "\n";
    sub << "Queue\n";
    a.submit_text = sub.str();
    return a;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& path) {
    IniFile ini;
    try {
        ini = parse_ini(text, path);
    } catch (const ConfigError& ex) {
        throw ScenarioError(ex.what());
    }
    const std::string base_dir = dirname_of(path);

    Scenario s;
    bool saw_scenario = false;
    for (const auto& sec : ini.sections) {
        try {
            if (sec.name == "scenario") {
                saw_scenario = true;
                s.horizon = dur_or_throw(ini, sec, "horizon", 0, /*required=*/true);
                s.cycle_period = dur_or_throw(ini, sec, "cycle_period", s.cycle_period);
                s.seed = static_cast<std::uint64_t>(int_or_throw(ini, sec, "seed", 0, 0));
            } else if (sec.name == "scheduler") {
                IniFile sub;
                sub.path = path;
                sub.sections.push_back(sec);
                s.scheduler = parse_general_config(sub).scheduler;
            } else if (sec.name.rfind("cluster", 0) == 0) {
                CloudDecl d = parse_cluster_section(ini, sec);
                for (const auto& prev : s.clouds) {
                    if (prev.cluster.name == d.cluster.name) {
                        throw ScenarioError(path + ": duplicate cluster " + d.cluster.name);
                    }
                }
                s.clouds.push_back(std::move(d));
            } else if (sec.name == "arrival") {
                s.arrivals.push_back(parse_arrival(ini, sec, base_dir));
            } else if (sec.name == "fault") {
                FaultScript f;
                f.time = dur_or_throw(ini, sec, "time", 0);
                f.cluster = sec.get("cluster");
                f.selector = sec.get("vm", "any");
                if (f.cluster.empty()) throw ScenarioError(path + ": [fault] needs cluster");
                s.faults.push_back(std::move(f));
            } else {
                throw ScenarioError(path + ":" + std::to_string(sec.line) +
                                    ": unknown section [" + sec.name + "]");
            }
        } catch (const ConfigError& ex) {
            throw ScenarioError(ex.what());
        }
    }
    if (!saw_scenario) throw ScenarioError(path + ": missing [scenario] section");
    if (s.horizon <= 0) throw ScenarioError(path + ": horizon must be positive");
    if (s.cycle_period <= 0) throw ScenarioError(path + ": cycle_period must be positive");

    std::stable_sort(s.arrivals.begin(), s.arrivals.end(),
                     [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
    std::stable_sort(s.faults.begin(), s.faults.end(),
                     [](const FaultScript& a, const FaultScript& b) { return a.time < b.time; });

    // Derive per-cluster seeds from the scenario seed unless pinned.
    for (auto& d : s.clouds) {
        if (!d.sim.rng_seed || d.sim.rng_seed == hash_str(d.cluster.name)) {
            d.sim.rng_seed = mix(s.seed, hash_str(d.cluster.name));
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

}  // namespace cloudsched
