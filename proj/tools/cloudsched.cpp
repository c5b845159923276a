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

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cloudsched/harness.hpp"
#include "cloudsched/ipc.hpp"
#include "cloudsched/persistence.hpp"
#include "daemon.hpp"

// Exit codes: 0 ok, 1 usage, 2 config, 3 runtime.
namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kConfig = 2;
constexpr int kRuntime = 3;

using namespace cloudsched;
using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json daemon_request(const std::string& socket, const json& req) {
    const std::string raw = ipc::request(socket, req.dump());
    if (raw.empty()) throw Error("daemon closed the connection");
    json resp = json::parse(raw, nullptr, false);
    if (resp.is_discarded()) throw Error("malformed daemon response");
    return resp;
}

int fail(const std::string& msg, int code) {
    std::cerr << "error: " << msg << std::endl;
    return code;
}

int cmd_run(const std::string& general_path, const std::string& clouds_path) {
    GeneralConfig gcfg;
    try {
        gcfg = load_general_config(general_path);
        // Validate the clouds file up front so a typo fails fast.
        load_clouds_config(clouds_path);
    } catch (const ConfigError& ex) {
        return fail(ex.what(), kConfig);
    }
    try {
        return run_daemon(gcfg, clouds_path);
    } catch (const ConfigError& ex) {
        return fail(ex.what(), kConfig);
    } catch (const std::exception& ex) {
        return fail(ex.what(), kRuntime);
    }
}

int cmd_submit(const std::string& socket, const std::string& file, const std::string& user) {
    try {
        json req{{"cmd", "submit"}, {"user", user}, {"submit", slurp(file)}};
        json resp = daemon_request(socket, req);
        if (!resp.value("ok", false)) return fail(resp.value("error", "submit failed"), kRuntime);
        for (const auto& w : resp.value("warnings", std::vector<std::string>{})) {
            std::cerr << "warning: " << w << std::endl;
        }
        for (const auto& id : resp.at("ids")) std::cout << id.get<std::string>() << "\n";
        return kOk;
    } catch (const std::exception& ex) {
        return fail(ex.what(), kRuntime);
    }
}

int cmd_status(const std::string& socket, const std::string& snapshot_path) {
    try {
        SchedulerState st;
        if (!snapshot_path.empty()) {
            st = load_snapshot_file(snapshot_path);
        } else {
            json resp = daemon_request(socket, json{{"cmd", "status"}});
            if (!resp.value("ok", false)) return fail(resp.value("error", "status failed"), kRuntime);
            st = restore(resp.at("snapshot").get<std::string>());
        }
        std::cout << render_status(st);
        return kOk;
    } catch (const CorruptSnapshot& ex) {
        return fail(ex.what(), kConfig);
    } catch (const std::exception& ex) {
        return fail(ex.what(), kRuntime);
    }
}

int cmd_shutdown(const std::string& socket, bool persist, bool kill_all) {
    if (persist == kill_all) {
        std::cerr << "error: choose exactly one of --persist or --kill-all" << std::endl;
        return kUsage;
    }
    try {
        json resp = daemon_request(
            socket, json{{"cmd", "shutdown"}, {"mode", persist ? "persist" : "kill-all"}});
        if (!resp.value("ok", false)) return fail(resp.value("error", "shutdown failed"), kRuntime);
        std::cout << "shutdown requested (" << (persist ? "persist" : "kill-all") << ")\n";
        return kOk;
    } catch (const std::exception& ex) {
        return fail(ex.what(), kRuntime);
    }
}

int cmd_simulate(const std::string& scenario_path, const std::string& outdir) {
    Scenario s;
    try {
        s = load_scenario(scenario_path);
    } catch (const ScenarioError& ex) {
        return fail(ex.what(), kConfig);
    }
    try {
        RunResult rr = run_scenario(s);
        if (!outdir.empty()) {
            write_reports(rr, outdir);
            std::cout << "reports written to " << outdir << "\n";
        }
        std::cout << render_metrics_text(rr.metrics);
        return kOk;
    } catch (const std::exception& ex) {
        return fail(ex.what(), kRuntime);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cloudsched: boots, balances and retires VMs on IaaS clouds for a batch queue"};
    app.require_subcommand(1);

    std::string general_path, clouds_path;
    auto* run = app.add_subcommand("run", "run the scheduler against the configured clouds");
    run->add_option("-c,--config", general_path, "general config file")->required();
    run->add_option("-r,--resources", clouds_path, "cloud resources config file")->required();

    std::string submit_file, submit_user, socket_override;
    auto* submit = app.add_subcommand("submit", "submit a job description to the running scheduler");
    submit->add_option("-f,--file", submit_file, "submit description file")->required();
    submit->add_option("-u,--user", submit_user, "submitting user")->required();

    std::string status_snapshot;
    auto* status = app.add_subcommand("status", "show clusters, VMs and per-user allocation");
    status->add_option("--snapshot", status_snapshot, "read a snapshot file instead of the daemon");

    bool persist = false, kill_all = false;
    auto* shutdown = app.add_subcommand("shutdown", "stop the scheduler");
    shutdown->add_flag("--persist", persist, "persist state; VMs keep running");
    shutdown->add_flag("--kill-all", kill_all, "shut down every managed VM");

    std::string scenario_path, outdir;
    auto* simulate = app.add_subcommand("simulate", "run a scenario on the virtual clock");
    simulate->add_option("-s,--scenario", scenario_path, "scenario file")->required();
    simulate->add_option("-o,--out", outdir, "output directory for reports");

    for (auto* sc : {submit, status, shutdown}) {
        sc->add_option("--socket", socket_override, "daemon socket path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    std::string socket = socket_override.empty() ? GeneralConfig{}.ipc_socket : socket_override;

    if (run->parsed()) return cmd_run(general_path, clouds_path);
    if (submit->parsed()) return cmd_submit(socket, submit_file, submit_user);
    if (status->parsed()) return cmd_status(socket, status_snapshot);
    if (shutdown->parsed()) return cmd_shutdown(socket, persist, kill_all);
    if (simulate->parsed()) return cmd_simulate(scenario_path, outdir);
    return kUsage;
}
