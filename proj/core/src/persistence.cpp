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

#include "cloudsched/persistence.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cloudsched {

using nlohmann::json;

namespace {

json vm_to_json(const VmRecord& vm) {
    return json{
        {"name", vm.name},
        {"id", vm.id},
        {"vmtype", vm.vmtype},
        {"vmstate", to_string(vm.vmstate)},
        {"hostname", vm.hostname},
        {"clusteraddr", vm.clusteraddr},
        {"network", to_string(vm.network)},
        {"cpuarch", to_string(vm.cpuarch)},
        {"image", vm.image},
        {"memory", vm.memory_mb},
        {"cpucores", vm.cpu_cores},
        {"storage", vm.storage_gb},
        {"errorcount", vm.error_count},
        {"lastpoll", vm.lastpoll},
        {"last_state_change", vm.last_state_change},
        {"owner", vm.owner},
    };
}

json job_to_json(const Job& j) {
    return json{
        {"id", j.global_job_id},
        {"user", j.user},
        {"priority", j.priority},
        {"vmtype", j.vmtype},
        {"network", to_string(j.vm_network)},
        {"cpuarch", to_string(j.vm_cpu_arch)},
        {"vm_name", j.vm_name},
        {"vm_loc", j.vm_loc},
        {"vm_ami", j.vm_ami},
        {"mem", j.vm_mem},
        {"cpucores", j.vm_cpu_cores},
        {"storage", j.vm_storage},
        {"sched_state", to_string(j.sched_state)},
        {"queue_state", to_string(j.queue_state)},
    };
}

// Field access that reports a JSON-pointer-ish position on failure.
template <typename T>
T field(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw CorruptSnapshot(where + "/" + key, "missing field");
    try {
        return it->get<T>();
    } catch (const json::exception& ex) {
        throw CorruptSnapshot(where + "/" + key, ex.what());
    }
}

VmRecord vm_from_json(const json& o, const std::string& where) {
    VmRecord vm;
    vm.name = field<std::string>(o, where, "name");
    vm.id = field<std::string>(o, where, "id");
    vm.vmtype = field<std::string>(o, where, "vmtype");
    vm.hostname = field<std::string>(o, where, "hostname");
    vm.clusteraddr = field<std::string>(o, where, "clusteraddr");
    vm.image = field<std::string>(o, where, "image");
    vm.memory_mb = field<int>(o, where, "memory");
    vm.cpu_cores = field<int>(o, where, "cpucores");
    vm.storage_gb = field<int>(o, where, "storage");
    vm.error_count = field<int>(o, where, "errorcount");
    vm.lastpoll = field<Millis>(o, where, "lastpoll");
    vm.last_state_change = field<Millis>(o, where, "last_state_change");
    vm.owner = field<std::string>(o, where, "owner");
    try {
        vm.vmstate = vm_state_from_string(field<std::string>(o, where, "vmstate"));
        vm.network = network_from_string(field<std::string>(o, where, "network"));
        vm.cpuarch = cpu_arch_from_string(field<std::string>(o, where, "cpuarch"));
    } catch (const Error& ex) {
        throw CorruptSnapshot(where, ex.what());
    }
    return vm;
}

Job job_from_json(const json& o, const std::string& where) {
    Job j;
    j.global_job_id = field<std::string>(o, where, "id");
    j.user = field<std::string>(o, where, "user");
    j.priority = field<int>(o, where, "priority");
    j.vmtype = field<std::string>(o, where, "vmtype");
    j.vm_name = field<std::string>(o, where, "vm_name");
    j.vm_loc = field<std::string>(o, where, "vm_loc");
    j.vm_ami = field<std::string>(o, where, "vm_ami");
    j.vm_mem = field<int>(o, where, "mem");
    j.vm_cpu_cores = field<int>(o, where, "cpucores");
    j.vm_storage = field<int>(o, where, "storage");
    try {
        j.vm_network = network_from_string(field<std::string>(o, where, "network"));
        j.vm_cpu_arch = cpu_arch_from_string(field<std::string>(o, where, "cpuarch"));
        j.sched_state = sched_state_from_string(field<std::string>(o, where, "sched_state"));
        j.queue_state = queue_state_from_string(field<std::string>(o, where, "queue_state"));
    } catch (const Error& ex) {
        throw CorruptSnapshot(where, ex.what());
    }
    return j;
}

}  // namespace

std::string snapshot(const SchedulerState& state) {
    json doc;
    doc["format"] = kSnapshotFormat;
    doc["version"] = kSnapshotVersion;
    doc["clock"] = {
        {"mode", state.clock.mode() == ClockMode::Virtual ? "virtual" : "real"},
        {"now", state.clock.now()},
    };

    json clusters = json::array();
    for (const auto& c : state.pool.clusters) {
        json archs = json::array(), nets = json::array(), vms = json::array();
        for (const auto& a : c.cpu_archs) archs.push_back(to_string(a));
        for (const auto& n : c.networks) nets.push_back(to_string(n));
        for (const auto& vm : c.vms) vms.push_back(vm_to_json(vm));
        clusters.push_back(json{
            {"name", c.name},
            {"host", c.host},
            {"cloud_type", to_string(c.cloud_type)},
            {"memory", c.memory_mb},
            {"cpu_archs", archs},
            {"networks", nets},
            {"vm_slots", c.vm_slots},
            {"cpu_cores", c.cpu_cores},
            {"storage", c.storage_gb},
            {"vms", vms},
        });
    }
    doc["clusters"] = clusters;

    json new_list = json::array(), scheduled = json::array();
    for (const auto& j : state.job_pool.new_list) new_list.push_back(job_to_json(j));
    for (const auto& j : state.job_pool.scheduled_list) scheduled.push_back(job_to_json(j));
    doc["job_pool"] = {{"new", new_list}, {"scheduled", scheduled}};

    doc["draining"] = json(state.draining);
    doc["drain_marked_at"] = json(state.drain_marked_at);
    doc["rebalance_holds"] = json(state.rebalance_holds);
    doc["submit_times"] = json(state.submit_times);

    return doc.dump(2) + "\n";
}

SchedulerState restore(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& ex) {
        throw CorruptSnapshot("byte " + std::to_string(ex.byte), ex.what());
    }
    if (!doc.is_object()) throw CorruptSnapshot("/", "document is not an object");
    if (field<std::string>(doc, "", "format") != kSnapshotFormat) {
        throw CorruptSnapshot("/format", "not a cloudsched state snapshot");
    }
    const int version = field<int>(doc, "", "version");
    if (version != kSnapshotVersion) throw UnsupportedVersion(version);

    SchedulerState st;
    const json& clk = doc.at("clock");
    const std::string mode = field<std::string>(clk, "/clock", "mode");
    const Millis now = field<Millis>(clk, "/clock", "now");
    st.clock = mode == "virtual" ? Clock::virtual_clock(now) : Clock::real();
    if (mode != "virtual" && mode != "real") throw CorruptSnapshot("/clock/mode", mode);

    std::size_t ci = 0;
    for (const auto& c : field<json>(doc, "", "clusters")) {
        const std::string where = "/clusters/" + std::to_string(ci++);
        Cluster cluster;
        cluster.name = field<std::string>(c, where, "name");
        cluster.host = field<std::string>(c, where, "host");
        cluster.memory_mb = field<int>(c, where, "memory");
        cluster.vm_slots = field<int>(c, where, "vm_slots");
        cluster.cpu_cores = field<int>(c, where, "cpu_cores");
        cluster.storage_gb = field<int>(c, where, "storage");
        try {
            cluster.cloud_type = cloud_type_from_string(field<std::string>(c, where, "cloud_type"));
            for (const auto& a : field<json>(c, where, "cpu_archs"))
                cluster.cpu_archs.insert(cpu_arch_from_string(a.get<std::string>()));
            for (const auto& n : field<json>(c, where, "networks"))
                cluster.networks.insert(network_from_string(n.get<std::string>()));
        } catch (const CorruptSnapshot&) {
            throw;
        } catch (const std::exception& ex) {
            throw CorruptSnapshot(where, ex.what());
        }
        std::size_t vi = 0;
        for (const auto& v : field<json>(c, where, "vms")) {
            cluster.vms.push_back(vm_from_json(v, where + "/vms/" + std::to_string(vi++)));
        }
        if (static_cast<int>(cluster.vms.size()) > cluster.vm_slots) {
            throw CorruptSnapshot(where, "more VMs than vm_slots");
        }
        if (st.pool.find(cluster.name)) throw CorruptSnapshot(where, "duplicate cluster name");
        st.pool.clusters.push_back(std::move(cluster));
    }

    const json& jp = doc.at("job_pool");
    std::size_t ji = 0;
    for (const auto& j : field<json>(jp, "/job_pool", "new"))
        st.job_pool.new_list.push_back(job_from_json(j, "/job_pool/new/" + std::to_string(ji++)));
    ji = 0;
    for (const auto& j : field<json>(jp, "/job_pool", "scheduled"))
        st.job_pool.scheduled_list.push_back(
            job_from_json(j, "/job_pool/scheduled/" + std::to_string(ji++)));
    for (const auto& j : st.job_pool.new_list) {
        if (st.job_pool.scheduled_list.end() !=
            std::find_if(st.job_pool.scheduled_list.begin(), st.job_pool.scheduled_list.end(),
                         [&](const Job& s) { return s.global_job_id == j.global_job_id; })) {
            throw CorruptSnapshot("/job_pool", "job " + j.global_job_id + " in both lists");
        }
    }

    try {
        st.draining = doc.at("draining").get<std::set<std::string>>();
        st.drain_marked_at = doc.at("drain_marked_at").get<std::map<std::string, Millis>>();
        st.rebalance_holds = doc.at("rebalance_holds").get<std::map<std::string, std::string>>();
        st.submit_times = doc.at("submit_times").get<std::map<std::string, Millis>>();
    } catch (const json::exception& ex) {
        throw CorruptSnapshot("/bookkeeping", ex.what());
    }
    return st;
}

void save_snapshot_file(const SchedulerState& state, const std::string& path) {
    if (path.empty()) throw WriteFailure("empty snapshot path");
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw WriteFailure("cannot open " + tmp);
        out << snapshot(state);
        if (!out.good()) throw WriteFailure("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw WriteFailure("rename " + tmp + " -> " + path + " failed");
    }
}

SchedulerState load_snapshot_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorruptSnapshot(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return restore(buf.str());
}

}  // namespace cloudsched
