#include "agentmesh/debugger.hpp"

#include <sstream>

namespace agentmesh {

namespace {

std::string execution_payload(const std::string& entry,
                              const ExecutionOutcome& outcome) {
    std::string payload = "entry=" + entry + " exit=";
    payload += outcome.exit_code ? std::to_string(*outcome.exit_code) : "killed";
    payload += outcome.timed_out ? " timed_out=1" : " timed_out=0";
    if (!outcome.stderr_text.empty()) {
        payload += "\n" + outcome.stderr_text;
    }
    return payload;
}

}  // namespace

VerifyResult verify(const VirtualWorkspace& workspace,
                    const std::string& entry_file, const SandboxConfig& config,
                    const std::optional<Harness>& harness) {
    VirtualWorkspace scratch = workspace;
    std::string entry = entry_file;
    if (harness) {
        scratch.put_file(harness->file_name, harness->content);
        entry = harness->file_name;
    }
    MaterializedDir dir = materialize(scratch);
    VerifyResult result;
    result.outcome = execute(dir, entry, config);
    scrub_outcome(&result.outcome, dir.path().string());
    result.passed = result.outcome.passed();
    return result;
}

std::vector<ChatMessage> build_fix_prompt(const std::string& code,
                                          const ExecutionOutcome& outcome,
                                          const PromptTemplate& tmpl) {
    std::string error_text;
    if (outcome.timed_out) {
        error_text =
            "The program did not terminate within the time limit and was "
            "killed.";
    } else {
        error_text = outcome.stderr_text;
        if (error_text.empty()) {
            error_text = "The program exited with code " +
                         (outcome.exit_code
                              ? std::to_string(*outcome.exit_code)
                              : std::string("unknown")) +
                         " and produced no error output.";
        }
    }
    std::string user = substitute(tmpl.user, "code", code);
    user = substitute(user, "error", error_text);
    return {{MessageRole::System, tmpl.system}, {MessageRole::User, user}};
}

std::string normalize_code(const std::string& code) {
    std::string out;
    std::istringstream stream(code);
    std::string line;
    while (std::getline(stream, line)) {
        auto end = line.find_last_not_of(" \t\r");
        if (end == std::string::npos) {
            line.clear();
        } else {
            line.resize(end + 1);
        }
        out += line;
        out += '\n';
    }
    while (out.size() >= 2 && out[out.size() - 1] == '\n' &&
           out[out.size() - 2] == '\n') {
        out.pop_back();
    }
    return out;
}

DebugResult debug_task(const VirtualWorkspace& workspace,
                       const CodeContribution& contribution,
                       const std::string& entry_file, Gateway& gateway,
                       const DebugTaskOptions& options) {
    VirtualWorkspace scratch = apply_update(workspace, contribution.files);

    // Paths this task has written; final_files is their last verified state.
    std::vector<std::string> touched;
    for (const auto& [path, _] : contribution.files) touched.push_back(path);

    std::string primary = entry_file;
    if (!contribution.files.count(primary)) {
        primary = contribution.files.begin()->first;
    }

    DebugResult result;
    auto snapshot_final = [&] {
        result.final_files.clear();
        for (const auto& path : touched) {
            if (const std::string* content = scratch.find_file(path)) {
                result.final_files[path] = *content;
            }
        }
    };

    auto emit = [&](AgentId agent, EventKind kind, std::string payload) {
        if (options.transcript) {
            options.transcript->emit(agent, kind, options.task_index,
                                     std::move(payload));
        }
    };

    while (true) {
        VerifyResult vr =
            verify(scratch, primary, options.sandbox, options.harness);
        ++result.verification_rounds;
        result.outcomes.push_back(vr.outcome);
        emit(AgentId::Sandbox, EventKind::ExecutionRun,
             execution_payload(options.harness ? options.harness->file_name
                                               : primary,
                               vr.outcome));

        if (vr.passed) {
            result.status = result.fix_attempts == 0
                                ? TaskStatus::clean_pass()
                                : TaskStatus::fixed(result.fix_attempts);
            snapshot_final();
            return result;
        }

        if (result.fix_attempts >= options.max_fix_attempts) {
            emit(AgentId::Debugger, EventKind::LoopBreak, "retry limit");
            result.status = TaskStatus::needs_attention("retry limit");
            snapshot_final();
            return result;
        }

        const std::string* failing_code = scratch.find_file(primary);
        CompletionRequest request;
        request.agent_role = AgentRole::Debugger;
        request.params = options.params;
        request.messages = build_fix_prompt(failing_code ? *failing_code : "",
                                            vr.outcome, options.fix_template);

        std::string fix;
        try {
            emit(AgentId::Debugger, EventKind::PromptSent,
                 "prompt_sha256=" + prompt_digest(request.messages));
            fix = gateway.complete(request);
            ++result.fix_attempts;
            emit(AgentId::Debugger, EventKind::CompletionReceived, fix);
        } catch (const CassetteMismatchError&) {
            throw;  // replay-integrity failures abort the whole run
        } catch (const CassetteExhaustedError&) {
            throw;
        } catch (const GatewayError& e) {
            emit(AgentId::Debugger, EventKind::Error, e.what());
            result.status = TaskStatus::needs_attention(
                std::string("backend error: ") + e.what());
            snapshot_final();
            return result;
        }

        CodeContribution fixed;
        try {
            fixed = extract_contribution(fix, primary);
        } catch (const Error& e) {
            emit(AgentId::Debugger, EventKind::Error, e.what());
            result.status = TaskStatus::needs_attention(
                std::string("unusable fix: ") + e.what());
            snapshot_final();
            return result;
        }

        bool identical = true;
        for (const auto& [path, content] : fixed.files) {
            const std::string* current = scratch.find_file(path);
            if (!current || normalize_code(*current) != normalize_code(content)) {
                identical = false;
                break;
            }
        }
        if (identical) {
            emit(AgentId::Debugger, EventKind::LoopBreak, "identical fix");
            result.status = TaskStatus::needs_attention("identical fix");
            snapshot_final();
            return result;
        }

        for (const auto& [path, _] : fixed.files) {
            bool seen = false;
            for (const auto& known : touched) seen |= known == path;
            if (!seen) touched.push_back(path);
        }
        scratch = apply_update(scratch, fixed.files);
    }
}

}  // namespace agentmesh
