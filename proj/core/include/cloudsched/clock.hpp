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
#include <string>

namespace cloudsched {

/// Milliseconds. Used both for durations and for timestamps (milliseconds
/// since the clock's epoch; the virtual epoch is 0).
using Millis = std::int64_t;

constexpr Millis kMillisPerSecond = 1000;
constexpr Millis kMillisPerMinute = 60 * kMillisPerSecond;
constexpr Millis kMillisPerHour = 60 * kMillisPerMinute;

enum class ClockMode { Real, Virtual };

/// Monotonic time source. In Virtual mode time starts at 0 and moves only
/// through advance_to()/advance_by(); in Real mode now() follows the system
/// steady clock offset so that it also never decreases.
class Clock {
public:
    static Clock real();
    static Clock virtual_clock(Millis start = 0);

    ClockMode mode() const { return mode_; }
    Millis now() const;

    /// Virtual mode only; never moves backwards.
    void advance_to(Millis t);
    void advance_by(Millis dt) { advance_to(now_ + dt); }

private:
    explicit Clock(ClockMode mode, Millis start);

    ClockMode mode_;
    mutable Millis now_ = 0;
    Millis real_origin_ = 0;  // steady-clock ms at construction
};

/// Parses "250ms", "30s", "5m", "7h" or a bare integer (seconds).
/// Throws std::invalid_argument on anything else.
Millis parse_duration(const std::string& text);

/// Compact human form, e.g. "7h", "90s", "1500ms".
std::string format_duration(Millis ms);

}  // namespace cloudsched
