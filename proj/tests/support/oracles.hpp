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

// Independent oracles for the scheduler's decision procedures. They stay
// deliberately naive (slot-by-slot pouring, exhaustive search) so they share
// no code path with the implementations they check.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cloudsched/scheduler.hpp"

namespace cloudsched::test {

/// Progressive filling: hand out one slot at a time, always to the user with
/// the lowest current allocation among those still below their demand,
/// breaking ties by earliest submit then name.
inline std::map<std::string, int> fair_share_oracle(const std::vector<UserDemand>& users,
                                                    int capacity) {
    std::map<std::string, int> alloc;
    for (const auto& u : users) alloc[u.user] = 0;
    for (int slot = 0; slot < capacity; ++slot) {
        const UserDemand* pick = nullptr;
        for (const auto& u : users) {
            if (alloc[u.user] >= u.outstanding) continue;
            if (!pick ||
                std::make_tuple(alloc[u.user], u.earliest_submit, u.user) <
                    std::make_tuple(alloc[pick->user], pick->earliest_submit, pick->user)) {
                pick = &u;
            }
        }
        if (!pick) break;
        alloc[pick->user] += 1;
    }
    return alloc;
}

/// Leximin selection by exhaustive enumeration over all feasible target
/// vectors (tiny inputs only): most-even allocation first, ties resolved
/// in favour of earlier submitters. Validates the greedy oracle itself.
inline std::map<std::string, int> fair_share_exhaustive(const std::vector<UserDemand>& users,
                                                        int capacity) {
    const std::size_t n = users.size();

    std::vector<std::size_t> rank(n);  // earliest-submit order
    for (std::size_t i = 0; i < n; ++i) rank[i] = i;
    std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(users[a].earliest_submit, users[a].user) <
               std::tie(users[b].earliest_submit, users[b].user);
    });

    using Key = std::pair<std::vector<int>, std::vector<int>>;
    auto key = [&](const std::vector<int>& v) -> Key {
        std::vector<int> sorted = v;
        std::sort(sorted.begin(), sorted.end());  // leximin: compare ascending
        std::vector<int> by_rank;
        by_rank.reserve(n);
        for (std::size_t r : rank) by_rank.push_back(v[r]);
        return {sorted, by_rank};
    };

    std::vector<int> best, cur(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i == n) {
            if (best.empty() || key(cur) > key(best)) best = cur;
            return;
        }
        for (int t = 0; t <= std::min(users[i].outstanding, left); ++t) {
            cur[i] = t;
            rec(i + 1, left - t);
        }
        cur[i] = 0;
    };
    rec(0, std::max(capacity, 0));

    std::map<std::string, int> out;
    for (std::size_t i = 0; i < n; ++i) out[users[i].user] = best.empty() ? 0 : best[i];
    return out;
}

struct OracleWorker {
    std::string name;
    std::string vmtype;
    bool busy = false;
};

struct OracleJob {
    std::string id;
    std::string vmtype;
    int priority = 1;
    Millis submit_time = 0;
};

/// Brute-force matchmaker: enumerates every assignment of distinct queued
/// jobs to idle VMs (VMs in name order, unfillable VMs skipped) and returns
/// the maximal one whose per-VM job-key sequence is lexicographically
/// smallest under (priority desc, submit asc, id asc).
inline std::vector<std::pair<std::string, std::string>> dispatch_oracle(
    std::vector<OracleWorker> workers, const std::vector<OracleJob>& jobs) {
    std::sort(workers.begin(), workers.end(),
              [](const OracleWorker& a, const OracleWorker& b) { return a.name < b.name; });
    std::vector<const OracleWorker*> idle;
    for (const auto& w : workers) {
        if (!w.busy) idle.push_back(&w);
    }

    using JobKey = std::tuple<int, Millis, std::string>;
    const JobKey kNone{1 << 20, 0, "~"};  // "no job" sorts after any real job
    auto job_key = [](const OracleJob& j) {
        return JobKey{-j.priority, j.submit_time, j.id};
    };

    std::vector<JobKey> best_keys;
    std::vector<std::pair<std::string, std::string>> best, cur;
    std::vector<bool> used(jobs.size(), false);
    std::vector<JobKey> cur_keys;

    std::function<void(std::size_t)> rec = [&](std::size_t wi) {
        if (wi == idle.size()) {
            if (best_keys.empty() || cur_keys < best_keys) {
                best_keys = cur_keys;
                best = cur;
            }
            return;
        }
        bool any = false;
        for (std::size_t ji = 0; ji < jobs.size(); ++ji) {
            if (used[ji] || jobs[ji].vmtype != idle[wi]->vmtype) continue;
            any = true;
            used[ji] = true;
            cur.emplace_back(jobs[ji].id, idle[wi]->name);
            cur_keys.push_back(job_key(jobs[ji]));
            rec(wi + 1);
            cur_keys.pop_back();
            cur.pop_back();
            used[ji] = false;
        }
        if (!any) {
            cur_keys.push_back(kNone);
            rec(wi + 1);
            cur_keys.pop_back();
        }
    };
    rec(0);
    return best;
}

}  // namespace cloudsched::test
