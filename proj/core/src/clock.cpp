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

#include "cloudsched/clock.hpp"

#include <chrono>
#include <stdexcept>

namespace cloudsched {

namespace {
Millis steady_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}
}  // namespace

Clock::Clock(ClockMode mode, Millis start) : mode_(mode), now_(start) {
    if (mode_ == ClockMode::Real) {
        real_origin_ = steady_ms() - start;
    }
}

Clock Clock::real() { return Clock(ClockMode::Real, 0); }

Clock Clock::virtual_clock(Millis start) { return Clock(ClockMode::Virtual, start); }

Millis Clock::now() const {
    if (mode_ == ClockMode::Real) {
        Millis t = steady_ms() - real_origin_;
        if (t > now_) now_ = t;
        return now_;
    }
    return now_;
}

void Clock::advance_to(Millis t) {
    if (mode_ != ClockMode::Virtual) {
        throw std::logic_error("Clock::advance_to is only valid in Virtual mode");
    }
    if (t > now_) now_ = t;
}

Millis parse_duration(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty duration");
    std::size_t pos = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad duration '" + text + "'");
    }
    if (value < 0) throw std::invalid_argument("negative duration '" + text + "'");
    std::string unit = text.substr(pos);
    if (unit.empty() || unit == "s") return value * kMillisPerSecond;
    if (unit == "ms") return value;
    if (unit == "m") return value * kMillisPerMinute;
    if (unit == "h") return value * kMillisPerHour;
    throw std::invalid_argument("unknown duration unit '" + unit + "'");
}

std::string format_duration(Millis ms) {
    if (ms % kMillisPerHour == 0) return std::to_string(ms / kMillisPerHour) + "h";
    if (ms % kMillisPerMinute == 0) return std::to_string(ms / kMillisPerMinute) + "m";
    if (ms % kMillisPerSecond == 0) return std::to_string(ms / kMillisPerSecond) + "s";
    return std::to_string(ms) + "ms";
}

}  // namespace cloudsched
