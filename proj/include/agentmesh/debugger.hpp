#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentmesh/coder.hpp"
#include "agentmesh/core.hpp"
#include "agentmesh/gateway.hpp"
#include "agentmesh/prompts.hpp"
#include "agentmesh/sandbox.hpp"
#include "agentmesh/transcript.hpp"

namespace agentmesh {

struct DebugResult {
    std::map<std::string, std::string> final_files;  // last verified candidate
    TaskStatus status;
    int verification_rounds = 0;  // >= 1
    int fix_attempts = 0;
    std::vector<ExecutionOutcome> outcomes;  // one per verification round
};

struct VerifyResult {
    ExecutionOutcome outcome;  // streams scrubbed of the temp dir path
    bool passed = false;
};

// Optional behavioral test injected as the entry file at verification time.
struct Harness {
    std::string file_name;
    std::string content;
};

// Materializes the workspace (plus harness, if any) and executes entry_file.
// Pass = exit code 0 and no timeout. The workspace argument is untouched.
VerifyResult verify(const VirtualWorkspace& workspace,
                    const std::string& entry_file, const SandboxConfig& config,
                    const std::optional<Harness>& harness = std::nullopt);

// Debugger prompt from the failing code and its execution outcome (stderr,
// or a fixed timeout notice when the run timed out).
std::vector<ChatMessage> build_fix_prompt(const std::string& code,
                                          const ExecutionOutcome& outcome,
                                          const PromptTemplate& tmpl);

// Strips trailing whitespace per line and collapses trailing blank lines;
// the equality domain of the identical-fix loop break.
std::string normalize_code(const std::string& code);

struct DebugTaskOptions {
    PromptTemplate fix_template = default_debugger_template();
    CompletionParams params;
    int max_fix_attempts = 3;
    SandboxConfig sandbox;
    std::optional<Harness> harness;
    // Optional hooks into the run transcript.
    Transcript* transcript = nullptr;
    std::optional<int> task_index;
};

// Bounded verify -> fix -> verify loop for one subtask. Applies the
// contribution to a scratch copy of the workspace, verifies by executing
// entry_file (or the harness), and on failure asks the gateway for a fix.
// Stops on pass, on the retry limit, or when a fix normalized-equals the
// previous candidate (identical-fix break). Gateway errors end the task as
// NeedsAttention("backend error: ...").
DebugResult debug_task(const VirtualWorkspace& workspace,
                       const CodeContribution& contribution,
                       const std::string& entry_file, Gateway& gateway,
                       const DebugTaskOptions& options);

}  // namespace agentmesh
