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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cloudsched {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- VM state machine ---

struct IllegalTransition : Error {
    IllegalTransition(const std::string& state, const std::string& event)
        : Error("illegal VM transition: event " + event + " from state " + state) {}
};

// --- submit-file parsing ---

struct SubmitError : Error {
    using Error::Error;
};

struct SubmitSyntaxError : SubmitError {
    SubmitSyntaxError(std::size_t line_no, const std::string& reason)
        : SubmitError("line " + std::to_string(line_no) + ": " + reason), line(line_no) {}
    std::size_t line;
};

struct DuplicateKey : SubmitError {
    explicit DuplicateKey(const std::string& k)
        : SubmitError("duplicate attribute " + k), key(k) {}
    std::string key;
};

struct MissingAttribute : SubmitError {
    explicit MissingAttribute(const std::string& k)
        : SubmitError("missing required attribute " + k), key(k) {}
    std::string key;
};

struct BadNumber : SubmitError {
    BadNumber(const std::string& k, const std::string& v)
        : SubmitError("attribute " + k + " is not a valid number: '" + v + "'"), key(k) {}
    std::string key;
};

// --- job queue ---

struct DuplicateJobId : Error {
    explicit DuplicateJobId(const std::string& id)
        : Error("job id already queued: " + id) {}
};

struct WrongState : Error {
    using Error::Error;
};

// --- cloud backends ---

struct UnknownVm : Error {
    explicit UnknownVm(const std::string& id) : Error("unknown VM: " + id) {}
};

struct BootRejected : Error {
    using Error::Error;
};

// --- configuration and scenarios ---

struct ConfigError : Error {
    ConfigError(const std::string& file, std::size_t line_no, const std::string& reason)
        : Error(file + ":" + std::to_string(line_no) + ": " + reason),
          file_name(file),
          line(line_no) {}
    ConfigError(const std::string& file, const std::string& reason)
        : Error(file + ": " + reason), file_name(file), line(0) {}
    std::string file_name;
    std::size_t line;
};

struct ScenarioError : Error {
    using Error::Error;
};

// --- persistence ---

struct CorruptSnapshot : Error {
    CorruptSnapshot(const std::string& where, const std::string& reason)
        : Error("corrupt snapshot at " + where + ": " + reason) {}
};

struct UnsupportedVersion : Error {
    explicit UnsupportedVersion(int found)
        : Error("unsupported snapshot version " + std::to_string(found)) {}
};

struct WriteFailure : Error {
    using Error::Error;
};

}  // namespace cloudsched
