#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agentmesh/core.hpp"
#include "agentmesh/gateway.hpp"
#include "agentmesh/planner.hpp"
#include "agentmesh/prompts.hpp"
#include "agentmesh/sandbox.hpp"
#include "agentmesh/transcript.hpp"

namespace agentmesh {

enum class Verdict { Approved, NeedsWork, Unknown };

std::string to_string(Verdict verdict);

struct ReviewReport {
    std::string text;
    Verdict verdict = Verdict::Unknown;
    std::optional<ExecutionOutcome> integration_outcome;
};

// Full-codebase review prompt. Throws Error on an empty workspace and
// TemplateError on a template missing the {code} placeholder. Oversized
// codebases are truncated file-by-file against max_code_bytes with a notice.
std::vector<ChatMessage> build_review_prompt(
    const UserRequest& request, const Plan& plan,
    const VirtualWorkspace& workspace, const PromptTemplate& tmpl,
    const std::string& integration_summary = "",
    std::size_t max_code_bytes = 256 * 1024);

// Scans lines from the end for "VERDICT: APPROVED" / "VERDICT: NEEDS_WORK"
// (exact after trim). Total: every input maps to one verdict.
Verdict parse_verdict(const std::string& report_text);

struct IntegrationConfig {
    SandboxConfig sandbox;
    std::string entry_file;
};

// Final review stage. Optionally runs one full-program integration execution
// first and embeds its summary in the prompt. Gateway failures degrade to a
// ReviewReport with verdict Unknown, never an exception: review must not
// destroy the run's code output.
ReviewReport review(const UserRequest& request, const Plan& plan,
                    const VirtualWorkspace& workspace, Gateway& gateway,
                    const PromptTemplate& tmpl, const CompletionParams& params,
                    const std::optional<IntegrationConfig>& integration =
                        std::nullopt,
                    Transcript* transcript = nullptr);

}  // namespace agentmesh
