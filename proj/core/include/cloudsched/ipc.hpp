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

#include <atomic>
#include <functional>
#include <string>
#include <thread>

namespace cloudsched::ipc {

// Line-delimited request/response over a local unix socket: the client
// sends one JSON object per line, the daemon answers with one JSON line.
// Protocol documented in docs/ipc-protocol.md.

using Handler = std::function<std::string(const std::string& request_line)>;

/// Accept loop on a unix socket; one request line per connection round.
class LineServer {
public:
    LineServer(std::string socket_path, Handler handler);
    ~LineServer();

    LineServer(const LineServer&) = delete;
    LineServer& operator=(const LineServer&) = delete;

    void start();  // throws Error when the socket cannot be bound
    void stop();

private:
    void accept_loop();

    std::string path_;
    Handler handler_;
    int listen_fd_ = -1;
    std::atomic<bool> running_{false};
    std::thread thread_;
};

/// One request/response round trip. Throws Error when the daemon is not
/// reachable.
std::string request(const std::string& socket_path, const std::string& line,
                    int timeout_ms = 5000);

}  // namespace cloudsched::ipc
