#include "agentmesh/reviewer.hpp"

#include <sstream>

namespace agentmesh {

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Approved: return "approved";
        case Verdict::NeedsWork: return "needs_work";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string render_codebase_capped(const VirtualWorkspace& workspace,
                                   std::size_t max_bytes) {
    std::string full = render_codebase(workspace);
    if (full.size() <= max_bytes) return full;

    std::size_t per_file = max_bytes / std::max<std::size_t>(
                                           workspace.files().size(), 1);
    std::string out;
    for (const auto& [path, content] : workspace.files()) {
        out += "== FILE: " + path + " ==\n";
        if (content.size() <= per_file) {
            out += content;
        } else {
            out += content.substr(0, per_file);
            out += "\n[file truncated for review]";
        }
        out += "\n\n";
    }
    return out;
}

}  // namespace

std::vector<ChatMessage> build_review_prompt(
    const UserRequest& request, const Plan& plan,
    const VirtualWorkspace& workspace, const PromptTemplate& tmpl,
    const std::string& integration_summary, std::size_t max_code_bytes) {
    if (workspace.empty()) {
        throw Error("cannot review an empty workspace");
    }
    std::string integration;
    if (!integration_summary.empty()) {
        integration = "Integration run:\n" + integration_summary + "\n\n";
    }
    std::string user =
        substitute(tmpl.user, "code",
                   render_codebase_capped(workspace, max_code_bytes));
    user = substitute(user, "request", request.text(), /*required=*/false);
    user = substitute(user, "plan", render_plan(plan), /*required=*/false);
    user = substitute(user, "integration", integration, /*required=*/false);
    return {{MessageRole::System, tmpl.system}, {MessageRole::User, user}};
}

Verdict parse_verdict(const std::string& report_text) {
    std::vector<std::string> lines;
    std::istringstream stream(report_text);
    std::string line;
    while (std::getline(stream, line)) lines.push_back(line);
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        std::string t = trim(*it);
        if (t == "VERDICT: APPROVED") return Verdict::Approved;
        if (t == "VERDICT: NEEDS_WORK") return Verdict::NeedsWork;
    }
    return Verdict::Unknown;
}

ReviewReport review(const UserRequest& request, const Plan& plan,
                    const VirtualWorkspace& workspace, Gateway& gateway,
                    const PromptTemplate& tmpl, const CompletionParams& params,
                    const std::optional<IntegrationConfig>& integration,
                    Transcript* transcript) {
    ReviewReport report;

    std::string integration_summary;
    if (integration) {
        MaterializedDir dir = materialize(workspace);
        ExecutionOutcome outcome =
            execute(dir, integration->entry_file, integration->sandbox);
        scrub_outcome(&outcome, dir.path().string());
        report.integration_outcome = outcome;
        if (transcript) {
            transcript->emit(
                AgentId::Sandbox, EventKind::ExecutionRun, std::nullopt,
                "entry=" + integration->entry_file + " exit=" +
                    (outcome.exit_code ? std::to_string(*outcome.exit_code)
                                       : std::string("killed")) +
                    (outcome.timed_out ? " timed_out=1" : " timed_out=0"));
        }
        integration_summary =
            "Executing " + integration->entry_file + " exited with " +
            (outcome.exit_code ? "code " + std::to_string(*outcome.exit_code)
                               : std::string("no exit code (killed)")) +
            (outcome.timed_out ? " after timing out." : ".");
        if (!outcome.stderr_text.empty()) {
            integration_summary += " Error output:\n" + outcome.stderr_text;
        }
    }

    try {
        CompletionRequest completion_request;
        completion_request.agent_role = AgentRole::Reviewer;
        completion_request.params = params;
        completion_request.messages = build_review_prompt(
            request, plan, workspace, tmpl, integration_summary);
        if (transcript) {
            transcript->emit(AgentId::Reviewer, EventKind::PromptSent,
                             std::nullopt,
                             "prompt_sha256=" +
                                 prompt_digest(completion_request.messages));
        }
        report.text = gateway.complete(completion_request);
        if (transcript) {
            transcript->emit(AgentId::Reviewer, EventKind::CompletionReceived,
                             std::nullopt, report.text);
        }
        report.verdict = parse_verdict(report.text);
    } catch (const Error& e) {
        if (transcript) {
            transcript->emit(AgentId::Reviewer, EventKind::Error, std::nullopt,
                             e.what());
        }
        report.text = std::string("Review failed: ") + e.what();
        report.verdict = Verdict::Unknown;
    }
    return report;
}

}  // namespace agentmesh
