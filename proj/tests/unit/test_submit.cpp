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

#include <doctest.h>

#include "cloudsched/rng.hpp"
#include "cloudsched/submit.hpp"

using namespace cloudsched;

namespace {

// The circulating sample script for VM-extended submit files, verbatim.
const char* kSampleScript = R"(Regular Condor Attributes
Universe                = vanilla
Executable              = script.sh
Arguments               = one two three
Log                     = script.log
Output                  = script.out
Error                   = script.error
should_transfer_files   = YES
when_to_transfer_output = ON_EXIT
#
# Cloud Scheduler Attributes
Requirements =
+VMType                 = "vm-name"
+VMLoc                  = "http://repository.tld/your.vm.img.gz"
+VMAMI                  = "ami-dfasfds"
+VMCPUArch              = "x86"
+VMCPUCores             = "1"
+VMNetwork              = "private"
+VMMem                  = "512"
+VMStorage              = "20"
Queue
)";

}  // namespace

TEST_SUITE("submit") {

TEST_CASE("sample script parses to the exact attribute set") {
    SubmitParse p = parse_submit(kSampleScript);
    const auto& d = p.descriptor;

    CHECK(d.queue_count == 1);
    CHECK(d.vm_attrs.at("VMType") == "vm-name");
    CHECK(d.vm_attrs.at("VMLoc") == "http://repository.tld/your.vm.img.gz");
    CHECK(d.vm_attrs.at("VMAMI") == "ami-dfasfds");
    CHECK(d.vm_attrs.at("VMCPUArch") == "x86");
    CHECK(d.vm_attrs.at("VMCPUCores") == "1");
    CHECK(d.vm_attrs.at("VMNetwork") == "private");
    CHECK(d.vm_attrs.at("VMMem") == "512");
    CHECK(d.vm_attrs.at("VMStorage") == "20");
    CHECK(d.vm_attrs.size() == 8);

    CHECK(d.standard_attrs.at("Universe") == "vanilla");
    CHECK(d.standard_attrs.at("Executable") == "script.sh");
    CHECK(d.standard_attrs.at("Arguments") == "one two three");
    CHECK(d.standard_attrs.at("should_transfer_files") == "YES");
    CHECK(d.standard_attrs.at("when_to_transfer_output") == "ON_EXIT");
    CHECK(d.standard_attrs.at("Requirements").empty());

    // the banner line is tolerated but reported
    REQUIRE(p.warnings.size() == 1);
    CHECK(p.warnings[0].find("annotation") != std::string::npos);
}

TEST_CASE("bare Queue is the minimal legal script") {
    SubmitParse p = parse_submit("Queue\n");
    CHECK(p.descriptor.queue_count == 1);
    CHECK(p.descriptor.vm_attrs.empty());
    CHECK(p.descriptor.standard_attrs.empty());
}

TEST_CASE("duplicate VM attribute") {
    CHECK_THROWS_AS(parse_submit("+VMType = \"a\"\n+VMType = \"b\"\nQueue\n"), DuplicateKey);
    // case-insensitive duplicate detection
    CHECK_THROWS_AS(parse_submit("+VMType = \"a\"\n+vmtype = \"b\"\nQueue\n"), DuplicateKey);
}

TEST_CASE("syntax errors carry the line number") {
    try {
        parse_submit("Universe = vanilla\n+VMType\nQueue\n");
        FAIL("expected SubmitSyntaxError");
    } catch (const SubmitSyntaxError& ex) {
        CHECK(ex.line == 2);
    }
    CHECK_THROWS_AS(parse_submit("= value\nQueue\n"), SubmitSyntaxError);
    CHECK_THROWS_AS(parse_submit("foo!bar\nQueue\n"), SubmitSyntaxError);
    CHECK_THROWS_AS(parse_submit("Queue 0\n"), SubmitSyntaxError);
    CHECK_THROWS_AS(parse_submit("Queue -2\n"), SubmitSyntaxError);
    CHECK_THROWS_AS(parse_submit("Queue 2 4\n"), SubmitSyntaxError);
    CHECK_THROWS_AS(parse_submit("Queue\nQueue\n"), SubmitSyntaxError);
    CHECK_THROWS_AS(parse_submit("+VMType = \"a\"\n"), SubmitSyntaxError);  // no Queue
    CHECK_THROWS_AS(parse_submit(""), SubmitSyntaxError);
}

TEST_CASE("keys are case-insensitive and stored canonically") {
    SubmitParse p = parse_submit("UNIVERSE = vanilla\n+vmtype = \"x\"\nqueue 3\n");
    CHECK(p.descriptor.standard_attrs.at("Universe") == "vanilla");
    CHECK(p.descriptor.vm_attrs.at("VMType") == "x");
    CHECK(p.descriptor.queue_count == 3);
}

TEST_CASE("unquoted plus-values warn but parse") {
    SubmitParse p = parse_submit("+VMType = worker\n+VMLoc = \"u\"\nQueue\n");
    CHECK(p.descriptor.vm_attrs.at("VMType") == "worker");
    REQUIRE(!p.warnings.empty());
    CHECK(p.warnings[0].find("not quoted") != std::string::npos);
}

TEST_CASE("unrecognized keys are preserved") {
    SubmitParse p = parse_submit("NiceUser = true\n+VMCustomThing = \"1\"\nQueue\n");
    CHECK(p.descriptor.standard_attrs.at("NiceUser") == "true");
    CHECK(p.descriptor.vm_attrs.at("VMCustomThing") == "1");
}

TEST_CASE("descriptor_to_jobs maps the sample to one job") {
    SubmitDescriptor d = parse_submit(kSampleScript).descriptor;
    auto jobs = descriptor_to_jobs(d, "alice", 0);
    REQUIRE(jobs.size() == 1);
    const Job& j = jobs[0];
    CHECK(j.global_job_id == "0.0");
    CHECK(j.user == "alice");
    CHECK(j.vmtype == "vm-name");
    CHECK(j.vm_loc == "http://repository.tld/your.vm.img.gz");
    CHECK(j.vm_ami == "ami-dfasfds");
    CHECK(j.vm_mem == 512);
    CHECK(j.vm_storage == 20);
    CHECK(j.vm_cpu_cores == 1);
    CHECK(j.vm_cpu_arch == CpuArch::X86);
    CHECK(j.vm_network == NetworkType::Private);
    CHECK(j.priority == 1);
    CHECK(j.sched_state == SchedState::New);
}

TEST_CASE("defaults: arch x86, one core, priority 1") {
    SubmitDescriptor d =
        parse_submit("+VMType = \"t\"\n+VMLoc = \"u\"\nQueue\n").descriptor;
    auto jobs = descriptor_to_jobs(d, "bob", 7);
    REQUIRE(jobs.size() == 1);
    CHECK(jobs[0].vm_cpu_arch == CpuArch::X86);
    CHECK(jobs[0].vm_cpu_cores == 1);
    CHECK(jobs[0].priority == 1);
    CHECK(jobs[0].vm_mem == 0);
    CHECK(jobs[0].vm_storage == 0);
    CHECK(jobs[0].global_job_id == "7.0");
}

TEST_CASE("missing required attributes") {
    SubmitDescriptor no_type = parse_submit("+VMLoc = \"u\"\nQueue\n").descriptor;
    CHECK_THROWS_AS(descriptor_to_jobs(no_type, "u", 0), MissingAttribute);

    SubmitDescriptor no_image = parse_submit("+VMType = \"t\"\nQueue\n").descriptor;
    try {
        descriptor_to_jobs(no_image, "u", 0);
        FAIL("expected MissingAttribute");
    } catch (const MissingAttribute& ex) {
        CHECK(ex.key == "image");
    }
}

TEST_CASE("bad numerics") {
    auto d = parse_submit("+VMType = \"t\"\n+VMLoc = \"u\"\n+VMMem = \"lots\"\nQueue\n")
                 .descriptor;
    CHECK_THROWS_AS(descriptor_to_jobs(d, "u", 0), BadNumber);
    d = parse_submit("+VMType = \"t\"\n+VMLoc = \"u\"\n+VMCPUCores = \"0\"\nQueue\n")
            .descriptor;
    CHECK_THROWS_AS(descriptor_to_jobs(d, "u", 0), BadNumber);
    d = parse_submit("+VMType = \"t\"\n+VMLoc = \"u\"\n+VMStorage = \"-1\"\nQueue\n")
            .descriptor;
    CHECK_THROWS_AS(descriptor_to_jobs(d, "u", 0), BadNumber);
}

TEST_CASE("priority attribute reaches the job") {
    auto d = parse_submit("priority = 5\n+VMType = \"t\"\n+VMLoc = \"u\"\nQueue 2\n")
                 .descriptor;
    auto jobs = descriptor_to_jobs(d, "u", 3);
    REQUIRE(jobs.size() == 2);
    CHECK(jobs[0].priority == 5);
    CHECK(jobs[0].global_job_id == "3.0");
    CHECK(jobs[1].global_job_id == "3.1");
}

TEST_CASE("queue_count jobs differ only in id") {
    auto d = parse_submit("+VMType = \"t\"\n+VMLoc = \"u\"\nQueue 50\n").descriptor;
    auto jobs = descriptor_to_jobs(d, "u", 1);
    REQUIRE(jobs.size() == 50);
    for (std::size_t i = 1; i < jobs.size(); ++i) {
        Job a = jobs[0], b = jobs[i];
        b.global_job_id = a.global_job_id;
        CHECK(a == b);
    }
}

TEST_CASE("serialize/parse round trip") {
    DetRng rng(0xF00D);
    const char* users[] = {"Universe", "Log", "Output", "NiceLevel", "Error"};
    const char* vms[] = {"VMType", "VMLoc", "VMAMI", "VMMem", "VMNetwork"};
    for (int trial = 0; trial < 300; ++trial) {
        SubmitDescriptor d;
        for (const char* k : users) {
            if (rng.chance(0.6)) d.standard_attrs[k] = "v" + std::to_string(rng.next_int(0, 99));
        }
        for (const char* k : vms) {
            if (rng.chance(0.6)) d.vm_attrs[k] = "x" + std::to_string(rng.next_int(0, 99));
        }
        d.queue_count = static_cast<int>(rng.next_int(1, 9));
        SubmitParse p = parse_submit(serialize_descriptor(d));
        CHECK(p.descriptor == d);
        CHECK(p.warnings.empty());
    }
}

TEST_CASE("parser is total over hostile input") {
    DetRng rng(0xFE11);
    const std::string alphabet = "aZ9 =+\"#\t_.-\n";
    for (int trial = 0; trial < 5000; ++trial) {
        std::string text;
        const int len = static_cast<int>(rng.next_int(0, 120));
        for (int i = 0; i < len; ++i) {
            text.push_back(alphabet[static_cast<std::size_t>(
                rng.next_int(0, static_cast<std::int64_t>(alphabet.size()) - 1))]);
        }
        try {
            parse_submit(text);
        } catch (const SubmitError&) {
            // positioned errors are the contract; anything else would escape
        }
    }
}

}  // TEST_SUITE
