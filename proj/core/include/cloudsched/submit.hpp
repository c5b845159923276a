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

#include <map>
#include <string>
#include <vector>

#include "cloudsched/domain.hpp"

namespace cloudsched {

/// A parsed Condor-style submit description file with the VM extension
/// attributes. Keys are matched case-insensitively and stored canonically;
/// plus-attribute values are stored with surrounding quotes stripped.
struct SubmitDescriptor {
    std::map<std::string, std::string> standard_attrs;
    std::map<std::string, std::string> vm_attrs;  // VMType, VMLoc, VMAMI, ...
    int queue_count = 1;

    bool operator==(const SubmitDescriptor&) const = default;
};

struct SubmitParse {
    SubmitDescriptor descriptor;
    std::vector<std::string> warnings;
};

/// Grammar: `key = value` lines, `+Key = "value"` VM attribute lines, `#`
/// comments, blank lines, and one `Queue [n]` statement. A line of bare
/// words (no '=') is ignored with a warning so that annotation headers in
/// circulating sample scripts parse. Throws SubmitSyntaxError, DuplicateKey.
SubmitParse parse_submit(const std::string& text);

/// Inverse of parse_submit up to layout: reparsing the output yields an
/// equal descriptor.
std::string serialize_descriptor(const SubmitDescriptor& d);

/// Expands a descriptor into queue_count jobs with ids "<id_seed>.<i>".
/// Applies the attribute defaults (VMCPUArch x86, VMCPUCores 1, priority 1,
/// VMNetwork private, VMMem/VMStorage 0). Throws MissingAttribute for VMType
/// or when both VMLoc and VMAMI are absent, BadNumber for bad numerics.
std::vector<Job> descriptor_to_jobs(const SubmitDescriptor& d, const std::string& user,
                                    long id_seed);

}  // namespace cloudsched
