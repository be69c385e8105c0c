#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "agentmesh/pipeline.hpp"

namespace {

using namespace agentmesh;

void handle_sigint(int) { sandbox_request_interrupt(); }

std::vector<std::string> split_command(const std::string& command) {
    std::vector<std::string> args;
    std::istringstream stream(command);
    std::string arg;
    while (stream >> arg) args.push_back(arg);
    return args;
}

// Flat-key JSON config file. CLI flags override config values override
// defaults.
void apply_config_file(const std::string& path, RunConfig* config) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    auto json = nlohmann::json::parse(in, nullptr, false);
    if (json.is_discarded() || !json.is_object()) {
        throw IoError("config file is not a JSON object: " + path);
    }
    if (json.contains("backend")) {
        std::string mode = json["backend"].get<std::string>();
        if (mode == "live") config->backend_mode = BackendMode::Live;
        else if (mode == "record") config->backend_mode = BackendMode::Record;
        else if (mode == "replay") config->backend_mode = BackendMode::Replay;
        else throw Error("config: unknown backend mode " + mode);
    }
    if (json.contains("cassette"))
        config->cassette_path = json["cassette"].get<std::string>();
    if (json.contains("api_base"))
        config->api_base_url = json["api_base"].get<std::string>();
    if (json.contains("model")) config->model = json["model"].get<std::string>();
    if (json.contains("max_fix_attempts"))
        config->max_fix_attempts = json["max_fix_attempts"].get<int>();
    if (json.contains("sandbox_timeout"))
        config->sandbox.timeout_seconds = json["sandbox_timeout"].get<double>();
    if (json.contains("capture_limit"))
        config->sandbox.capture_limit = json["capture_limit"].get<std::size_t>();
    if (json.contains("runtime_cmd"))
        config->sandbox.runtime_command =
            split_command(json["runtime_cmd"].get<std::string>());
    if (json.contains("main_file"))
        config->main_file = json["main_file"].get<std::string>();
    if (json.contains("harness_file"))
        config->harness_file = json["harness_file"].get<std::string>();
    if (json.contains("out"))
        config->out_dir = json["out"].get<std::string>();
    if (json.contains("context_budget"))
        config->context_budget = json["context_budget"].get<std::size_t>();
    if (json.contains("lenient_replay") && json["lenient_replay"].get<bool>())
        config->strict_replay = false;
    for (auto role : {AgentRole::Planner, AgentRole::Coder, AgentRole::Debugger,
                      AgentRole::Reviewer}) {
        std::string key = "template_" + to_string(role);
        if (json.contains(key))
            config->template_overrides[role] = json[key].get<std::string>();
        std::string model_key = "model_" + to_string(role);
        if (json.contains(model_key))
            config->model_per_role[role] = json[model_key].get<std::string>();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AgentMesh: cooperative multi-agent software pipeline"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the full pipeline");

    std::string request_text, request_file, config_file, backend, cassette,
        out_dir, runtime_cmd, main_file, harness_file, model;
    int max_fix_attempts = -1;
    double sandbox_timeout = -1.0;
    bool lenient_replay = false;

    auto* request_opt =
        run->add_option("--request", request_text, "Request text");
    run->add_option("--request-file", request_file,
                    "File containing the request text")
        ->excludes(request_opt);
    run->add_option("--config", config_file, "JSON config file");
    run->add_option("--backend", backend, "live|record|replay");
    run->add_option("--cassette", cassette, "Cassette path (record/replay)");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--max-fix-attempts", max_fix_attempts,
                    "Debug-loop fix budget per task");
    run->add_option("--sandbox-timeout", sandbox_timeout,
                    "Sandbox wall-clock timeout, seconds");
    run->add_option("--runtime-cmd", runtime_cmd,
                    "Runtime command template, e.g. \"python3 {file}\"");
    run->add_option("--main-file", main_file, "Default target file path");
    run->add_option("--harness-file", harness_file,
                    "Behavioral test script used as the verification entry");
    run->add_option("--model", model, "Model name for all roles");
    run->add_flag("--lenient-replay", lenient_replay,
                  "Replay matching on agent role only");
    std::string api_base;
    run->add_option("--api-base", api_base, "Chat-completions base URL");

    CLI11_PARSE(app, argc, argv);

    std::signal(SIGINT, handle_sigint);
    std::signal(SIGTERM, handle_sigint);

    try {
        RunConfig config;
        if (!config_file.empty()) apply_config_file(config_file, &config);

        if (!backend.empty()) {
            if (backend == "live") config.backend_mode = BackendMode::Live;
            else if (backend == "record") config.backend_mode = BackendMode::Record;
            else if (backend == "replay") config.backend_mode = BackendMode::Replay;
            else throw Error("unknown backend mode: " + backend);
        }
        if (!cassette.empty()) config.cassette_path = cassette;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (max_fix_attempts >= 0) config.max_fix_attempts = max_fix_attempts;
        if (sandbox_timeout > 0) config.sandbox.timeout_seconds = sandbox_timeout;
        if (!runtime_cmd.empty())
            config.sandbox.runtime_command = split_command(runtime_cmd);
        if (!main_file.empty()) config.main_file = main_file;
        if (!harness_file.empty()) config.harness_file = harness_file;
        if (!model.empty()) config.model = model;
        if (!api_base.empty()) config.api_base_url = api_base;
        if (lenient_replay) config.strict_replay = false;

        if ((config.backend_mode == BackendMode::Record ||
             config.backend_mode == BackendMode::Replay) &&
            config.cassette_path.empty()) {
            throw Error("record/replay mode requires --cassette");
        }

        std::string text = request_text;
        if (!request_file.empty()) {
            std::ifstream in(request_file);
            if (!in) throw IoError("cannot open request file: " + request_file);
            std::stringstream buffer;
            buffer << in.rdbuf();
            text = buffer.str();
        }
        UserRequest request(text);

        RunReport report = run_pipeline(request, config);
        write_outputs(report, config.out_dir);

        std::cout << "verdict: " << to_string(report.review.verdict) << "\n";
        for (const auto& [task, status] : report.statuses) {
            std::cout << "task " << task.index << " (" << task.title
                      << "): " << to_string(status.state);
            if (!status.reason.empty()) std::cout << " - " << status.reason;
            std::cout << "\n";
        }
        if (report.incomplete) {
            std::cerr << "aborted: " << report.abort_reason << "\n";
        }
        return exit_code_for(report);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 2;
    }
}
