#include "agentmesh/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "agentmesh/coder.hpp"

namespace agentmesh {

namespace fs = std::filesystem;

namespace {

PromptTemplate template_for(const RunConfig& config, AgentRole role) {
    auto it = config.template_overrides.find(role);
    if (it != config.template_overrides.end()) {
        return load_template_file(it->second);
    }
    switch (role) {
        case AgentRole::Planner: return default_planner_template();
        case AgentRole::Coder: return default_coder_template();
        case AgentRole::Debugger: return default_debugger_template();
        case AgentRole::Reviewer: return default_reviewer_template();
    }
    return default_planner_template();
}

CompletionParams params_for(const RunConfig& config, AgentRole role) {
    CompletionParams params;
    auto it = config.model_per_role.find(role);
    params.model_name = it != config.model_per_role.end() ? it->second
                                                          : config.model;
    return params;
}

std::string joined_paths(const std::map<std::string, std::string>& files) {
    std::string out;
    for (const auto& [path, _] : files) {
        if (!out.empty()) out += ',';
        out += path;
    }
    return out;
}

std::optional<Harness> load_harness(const RunConfig& config) {
    if (!config.harness_file) return std::nullopt;
    std::ifstream in(*config.harness_file);
    if (!in) {
        throw IoError("cannot open harness file: " + *config.harness_file);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return Harness{fs::path(*config.harness_file).filename().string(),
                   buffer.str()};
}

}  // namespace

std::unique_ptr<Gateway> make_gateway(const RunConfig& config) {
    switch (config.backend_mode) {
        case BackendMode::Replay:
            if (config.cassette_path.empty()) {
                throw Error("replay mode requires a cassette path");
            }
            return std::make_unique<ReplayGateway>(config.cassette_path,
                                                   config.strict_replay);
        case BackendMode::Record:
        case BackendMode::Live: {
            LiveConfig live;
            live.base_url = config.api_base_url;
            if (const char* key = std::getenv("AGENTMESH_API_KEY")) {
                live.api_key = key;
            }
            auto gateway = std::make_unique<LiveGateway>(live);
            if (config.backend_mode == BackendMode::Live) return gateway;
            if (config.cassette_path.empty()) {
                throw Error("record mode requires a cassette path");
            }
            return std::make_unique<RecordingGateway>(std::move(gateway),
                                                      config.cassette_path);
        }
    }
    throw Error("unknown backend mode");
}

RunReport run_pipeline(const UserRequest& request, const RunConfig& config) {
    auto gateway = make_gateway(config);
    return run_pipeline(request, config, *gateway);
}

RunReport run_pipeline(const UserRequest& request, const RunConfig& config,
                       Gateway& gateway) {
    RunReport report;
    Transcript& transcript = report.transcript;
    std::optional<Harness> harness = load_harness(config);

    auto abort_run = [&](const std::string& reason) {
        report.incomplete = true;
        report.abort_reason = reason;
        transcript.emit(AgentId::Orchestrator, EventKind::Error, std::nullopt,
                        reason);
        for (std::size_t i = report.statuses.size();
             i < report.plan.tasks.size(); ++i) {
            report.statuses.emplace_back(report.plan.tasks[i],
                                         TaskStatus::skipped("not reached"));
        }
    };

    // Phase 1: planning.
    try {
        CompletionRequest planner_request;
        planner_request.agent_role = AgentRole::Planner;
        planner_request.params = params_for(config, AgentRole::Planner);
        planner_request.messages = build_planner_prompt(
            request, template_for(config, AgentRole::Planner));
        transcript.emit(AgentId::Planner, EventKind::PromptSent, std::nullopt,
                        "prompt_sha256=" +
                            prompt_digest(planner_request.messages));
        std::string completion = gateway.complete(planner_request);
        transcript.emit(AgentId::Planner, EventKind::CompletionReceived,
                        std::nullopt, completion);
        report.plan = parse_plan(completion);
    } catch (const Error& e) {
        abort_run(std::string("planning failed: ") + e.what());
        return report;
    }

    report.final_workspace.put_artifact("plan", render_plan(report.plan));
    transcript.emit(AgentId::Orchestrator, EventKind::StateUpdate,
                    std::nullopt, "artifact=plan");

    // Phase 2 and 3: per-task coding and debugging.
    PromptTemplate coder_template = template_for(config, AgentRole::Coder);
    for (const Subtask& task : report.plan.tasks) {
        if (sandbox_interrupted()) {
            abort_run("interrupted");
            return report;
        }

        std::string completion;
        try {
            CompletionRequest coder_request;
            coder_request.agent_role = AgentRole::Coder;
            coder_request.params = params_for(config, AgentRole::Coder);
            coder_request.messages = build_coder_prompt(
                task, report.plan, report.final_workspace, coder_template,
                config.context_budget);
            transcript.emit(AgentId::Coder, EventKind::PromptSent, task.index,
                            "prompt_sha256=" +
                                prompt_digest(coder_request.messages));
            completion = gateway.complete(coder_request);
            transcript.emit(AgentId::Coder, EventKind::CompletionReceived,
                            task.index, completion);
        } catch (const Error& e) {
            abort_run(std::string("coder call failed: ") + e.what());
            return report;
        }

        CodeContribution contribution;
        try {
            contribution = extract_contribution(completion, config.main_file);
        } catch (const EmptyContributionError&) {
            transcript.emit(AgentId::Orchestrator, EventKind::StateUpdate,
                            task.index, "skipped: no code produced");
            report.statuses.emplace_back(
                task, TaskStatus::skipped("no code produced"));
            continue;
        } catch (const InvalidPathError& e) {
            transcript.emit(AgentId::Orchestrator, EventKind::Error,
                            task.index, e.what());
            report.statuses.emplace_back(
                task, TaskStatus::needs_attention(
                          std::string("invalid path: ") + e.what()));
            continue;
        }

        DebugTaskOptions options;
        options.fix_template = template_for(config, AgentRole::Debugger);
        options.params = params_for(config, AgentRole::Debugger);
        options.max_fix_attempts = config.max_fix_attempts;
        options.sandbox = config.sandbox;
        options.harness = harness;
        options.transcript = &transcript;
        options.task_index = task.index;

        DebugResult result;
        try {
            result = debug_task(report.final_workspace, contribution,
                                config.main_file, gateway, options);
        } catch (const Error& e) {
            abort_run(std::string("debug loop failed: ") + e.what());
            return report;
        }

        report.final_workspace =
            apply_update(std::move(report.final_workspace),
                         result.final_files);
        transcript.emit(AgentId::Orchestrator, EventKind::StateUpdate,
                        task.index, "files=" + joined_paths(result.final_files));
        report.statuses.emplace_back(task, result.status);
    }

    if (sandbox_interrupted()) {
        abort_run("interrupted");
        return report;
    }

    // Phase 4: review.
    if (report.final_workspace.empty()) {
        report.review.text = "Review skipped: the run produced no code.";
        report.review.verdict = Verdict::Unknown;
        transcript.emit(AgentId::Reviewer, EventKind::Error, std::nullopt,
                        "review skipped: empty workspace");
    } else {
        report.review = review(request, report.plan, report.final_workspace,
                               gateway, template_for(config, AgentRole::Reviewer),
                               params_for(config, AgentRole::Reviewer),
                               std::nullopt, &transcript);
    }
    return report;
}

void write_outputs(const RunReport& report, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "src", ec);
    if (ec) {
        throw IoError("cannot create output directory: " + out_dir);
    }

    auto write_file = [](const fs::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out) {
            throw IoError("cannot write output file: " + path.string());
        }
    };

    for (const auto& [path, content] : report.final_workspace.files()) {
        fs::path target = fs::path(out_dir) / "src" / path;
        fs::create_directories(target.parent_path(), ec);
        write_file(target, content);
    }

    const auto& artifacts = report.final_workspace.artifacts();
    auto plan_it = artifacts.find("plan");
    write_file(fs::path(out_dir) / "plan.md",
               plan_it != artifacts.end() ? plan_it->second + "\n" : "");
    write_file(fs::path(out_dir) / "review.md", report.review.text + "\n");
    write_file(fs::path(out_dir) / "transcript.jsonl",
               report.transcript.to_jsonl());

    nlohmann::ordered_json summary;
    summary["verdict"] = to_string(report.review.verdict);
    summary["incomplete"] = report.incomplete;
    if (report.incomplete) summary["abort_reason"] = report.abort_reason;
    int clean = 0, fixed = 0, attention = 0, skipped = 0;
    auto& tasks = summary["tasks"] = nlohmann::ordered_json::array();
    for (const auto& [task, status] : report.statuses) {
        nlohmann::ordered_json entry;
        entry["index"] = task.index;
        entry["title"] = task.title;
        entry["status"] = to_string(status.state);
        switch (status.state) {
            case TaskState::CleanPass: ++clean; break;
            case TaskState::Fixed:
                ++fixed;
                entry["fix_attempts"] = status.fix_attempts;
                break;
            case TaskState::NeedsAttention:
                ++attention;
                entry["reason"] = status.reason;
                break;
            case TaskState::Skipped:
                ++skipped;
                entry["reason"] = status.reason;
                break;
        }
        tasks.push_back(std::move(entry));
    }
    summary["counts"] = {{"clean_pass", clean},
                         {"fixed", fixed},
                         {"needs_attention", attention},
                         {"skipped", skipped}};
    write_file(fs::path(out_dir) / "report.json", summary.dump(2) + "\n");
}

int exit_code_for(const RunReport& report) {
    if (report.incomplete) return 2;
    bool all_ok = true;
    for (const auto& [_, status] : report.statuses) {
        if (status.state == TaskState::NeedsAttention) all_ok = false;
    }
    if (all_ok && report.review.verdict == Verdict::Approved) return 0;
    return 1;
}

}  // namespace agentmesh
