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

#include "cloudsched/submit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace cloudsched {

namespace {

constexpr std::array<const char*, 9> kStandardKeys = {
    "Universe", "Executable", "Arguments", "Log", "Output", "Error",
    "should_transfer_files", "when_to_transfer_output", "Requirements",
};

constexpr std::array<const char*, 8> kVmKeys = {
    "VMType", "VMLoc", "VMAMI", "VMCPUArch", "VMCPUCores",
    "VMStorage", "VMMem", "VMNetwork",
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Canonical spelling for a recognized key, or the key as given.
std::string canonical_key(const std::string& key, bool is_vm_attr) {
    const std::string k = lower(key);
    if (is_vm_attr) {
        for (const char* c : kVmKeys)
            if (lower(c) == k) return c;
    } else {
        for (const char* c : kStandardKeys)
            if (lower(c) == k) return c;
    }
    return key;
}

bool is_bare_words(const std::string& line) {
    for (unsigned char c : line) {
        if (!std::isalnum(c) && c != ' ' && c != '\t' && c != '_') return false;
    }
    return true;
}

bool parse_nonneg_int(const std::string& s, long& out) {
    if (s.empty()) return false;
    long v = 0;
    for (unsigned char c : s) {
        if (!std::isdigit(c)) return false;
        v = v * 10 + (c - '0');
        if (v > 1000000000L) return false;
    }
    out = v;
    return true;
}

}  // namespace

SubmitParse parse_submit(const std::string& text) {
    SubmitParse result;
    SubmitDescriptor& d = result.descriptor;
    bool saw_queue = false;

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        auto eq = line.find('=');
        if (eq == std::string::npos) {
            // Queue statement?
            std::istringstream ls(line);
            std::string word, count_str, extra;
            ls >> word >> count_str >> extra;
            if (lower(word) == "queue") {
                if (saw_queue) throw SubmitSyntaxError(line_no, "multiple Queue statements");
                if (!extra.empty()) throw SubmitSyntaxError(line_no, "trailing text after Queue count");
                if (count_str.empty()) {
                    d.queue_count = 1;
                } else {
                    long n = 0;
                    if (!parse_nonneg_int(count_str, n) || n < 1) {
                        throw SubmitSyntaxError(line_no, "Queue count must be a positive integer");
                    }
                    d.queue_count = static_cast<int>(n);
                }
                saw_queue = true;
                continue;
            }
            if (line[0] != '+' && is_bare_words(line)) {
                result.warnings.push_back("line " + std::to_string(line_no) +
                                          ": annotation ignored: '" + line + "'");
                continue;
            }
            throw SubmitSyntaxError(line_no, "expected 'key = value': '" + line + "'");
        }

        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw SubmitSyntaxError(line_no, "empty attribute name");

        if (key[0] == '+') {
            key = trim(key.substr(1));
            if (key.empty()) throw SubmitSyntaxError(line_no, "empty attribute name after '+'");
            key = canonical_key(key, /*is_vm_attr=*/true);
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
                value = value.substr(1, value.size() - 2);
            } else {
                result.warnings.push_back("line " + std::to_string(line_no) + ": value of +" +
                                          key + " is not quoted");
            }
            if (d.vm_attrs.count(key)) throw DuplicateKey(key);
            d.vm_attrs[key] = value;
        } else {
            key = canonical_key(key, /*is_vm_attr=*/false);
            d.standard_attrs[key] = value;  // last one wins, like condor_submit
        }
    }

    if (!saw_queue) throw SubmitSyntaxError(line_no + 1, "missing Queue statement");
    return result;
}

std::string serialize_descriptor(const SubmitDescriptor& d) {
    std::ostringstream out;
    for (const auto& [k, v] : d.standard_attrs) out << k << " = " << v << "\n";
    for (const auto& [k, v] : d.vm_attrs) out << "+" << k << " = \"" << v << "\"\n";
    out << "Queue";
    if (d.queue_count != 1) out << " " << d.queue_count;
    out << "\n";
    return out.str();
}

namespace {

long vm_attr_int(const SubmitDescriptor& d, const std::string& key, long fallback,
                 long min_value = 0) {
    auto it = d.vm_attrs.find(key);
    if (it == d.vm_attrs.end()) return fallback;
    long v = 0;
    if (!parse_nonneg_int(trim(it->second), v) || v < min_value) {
        throw BadNumber(key, it->second);
    }
    return v;
}

}  // namespace

std::vector<Job> descriptor_to_jobs(const SubmitDescriptor& d, const std::string& user,
                                    long id_seed) {
    Job proto;
    proto.user = user;

    auto vm = [&](const std::string& k) -> std::string {
        auto it = d.vm_attrs.find(k);
        return it == d.vm_attrs.end() ? std::string{} : it->second;
    };

    proto.vmtype = vm("VMType");
    if (proto.vmtype.empty()) throw MissingAttribute("VMType");
    proto.vm_loc = vm("VMLoc");
    proto.vm_ami = vm("VMAMI");
    if (proto.vm_loc.empty() && proto.vm_ami.empty()) throw MissingAttribute("image");
    proto.vm_name = vm("VMName");

    const std::string arch = vm("VMCPUArch");
    proto.vm_cpu_arch = arch.empty() ? CpuArch::X86 : cpu_arch_from_string(arch);
    const std::string net = vm("VMNetwork");
    proto.vm_network = net.empty() ? NetworkType::Private : network_from_string(net);

    proto.vm_mem = static_cast<int>(vm_attr_int(d, "VMMem", 0));
    proto.vm_storage = static_cast<int>(vm_attr_int(d, "VMStorage", 0));
    proto.vm_cpu_cores = static_cast<int>(vm_attr_int(d, "VMCPUCores", 1, /*min_value=*/1));

    // Priority is a standard submit attribute (default 1).
    proto.priority = 1;
    for (const auto& [k, v] : d.standard_attrs) {
        if (lower(k) == "priority") {
            long p = 0;
            std::string t = trim(v);
            bool neg = !t.empty() && t[0] == '-';
            if (!parse_nonneg_int(neg ? t.substr(1) : t, p)) throw BadNumber("Priority", v);
            proto.priority = static_cast<int>(neg ? -p : p);
        }
    }

    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(d.queue_count));
    for (int i = 0; i < d.queue_count; ++i) {
        Job j = proto;
        j.global_job_id = std::to_string(id_seed) + "." + std::to_string(i);
        jobs.push_back(std::move(j));
    }
    return jobs;
}

}  // namespace cloudsched
