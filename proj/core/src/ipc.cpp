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

#include "cloudsched/ipc.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "cloudsched/errors.hpp"

namespace cloudsched::ipc {

namespace {

sockaddr_un make_addr(const std::string& path) {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (path.size() >= sizeof(addr.sun_path)) {
        throw Error("socket path too long: " + path);
    }
    std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
    return addr;
}

// Reads until '\n' or EOF; bounded to keep a broken client from wedging us.
std::string read_line(int fd, int timeout_ms) {
    std::string line;
    char c;
    while (line.size() < 16 * 1024 * 1024) {
        pollfd pfd{fd, POLLIN, 0};
        int pr = ::poll(&pfd, 1, timeout_ms);
        if (pr <= 0) throw Error("ipc read timeout");
        ssize_t n = ::read(fd, &c, 1);
        if (n <= 0) break;
        if (c == '\n') return line;
        line.push_back(c);
    }
    return line;
}

void write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n <= 0) throw Error("ipc write failed");
        off += static_cast<std::size_t>(n);
    }
}

}  // namespace

LineServer::LineServer(std::string socket_path, Handler handler)
    : path_(std::move(socket_path)), handler_(std::move(handler)) {}

LineServer::~LineServer() { stop(); }

void LineServer::start() {
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error("socket(): " + std::string(std::strerror(errno)));
    ::unlink(path_.c_str());
    sockaddr_un addr = make_addr(path_);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw Error("bind(" + path_ + "): " + std::strerror(errno));
    }
    if (::listen(listen_fd_, 8) != 0) {
        throw Error("listen(): " + std::string(std::strerror(errno)));
    }
    running_ = true;
    thread_ = std::thread([this] { accept_loop(); });
}

void LineServer::accept_loop() {
    while (running_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        int pr = ::poll(&pfd, 1, 100);
        if (!running_) break;
        if (pr <= 0) continue;
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        try {
            std::string req = read_line(fd, 5000);
            std::string resp = handler_(req);
            write_all(fd, resp + "\n");
        } catch (const std::exception&) {
            // drop the connection; client sees EOF
        }
        ::close(fd);
    }
}

void LineServer::stop() {
    if (!running_.exchange(false)) {
        if (thread_.joinable()) thread_.join();
        return;
    }
    if (thread_.joinable()) thread_.join();
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    ::unlink(path_.c_str());
}

std::string request(const std::string& socket_path, const std::string& line, int timeout_ms) {
    int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd < 0) throw Error("socket(): " + std::string(std::strerror(errno)));
    sockaddr_un addr = make_addr(socket_path);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw Error("cannot reach daemon at " + socket_path + ": " + std::strerror(errno));
    }
    try {
        write_all(fd, line + "\n");
        std::string resp = read_line(fd, timeout_ms);
        ::close(fd);
        return resp;
    } catch (...) {
        ::close(fd);
        throw;
    }
}

}  // namespace cloudsched::ipc
