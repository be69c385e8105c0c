#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "agentmesh/core.hpp"
#include "agentmesh/gateway.hpp"
#include "agentmesh/planner.hpp"
#include "agentmesh/prompts.hpp"

namespace agentmesh {

// Code extracted from one coder (or debugger) completion.
struct CodeContribution {
    std::map<std::string, std::string> files;  // non-empty, valid paths
    std::string raw_completion;
};

// Prompt for one subtask. Workspace context is the full render_codebase
// output when it fits in context_budget bytes, otherwise a per-file
// signatures-only digest.
std::vector<ChatMessage> build_coder_prompt(const Subtask& task,
                                            const Plan& plan,
                                            const VirtualWorkspace& workspace,
                                            const PromptTemplate& tmpl,
                                            std::size_t context_budget);

// Per file: the path header plus lines matching a definition pattern.
std::string signature_digest(const VirtualWorkspace& workspace);

// Pulls code out of a completion. Fenced blocks win; a first-line
// "# FILE: <path>" or "// FILE: <path>" directive inside a fence assigns the
// target and is stripped. Unassigned fences go to default_path (multiple
// ones concatenated with one blank line between). A fence-free completion
// goes to default_path whole, trimmed.
// Throws EmptyContributionError when nothing is left after trimming and
// InvalidPathError for directives outside the workspace namespace.
CodeContribution extract_contribution(const std::string& completion,
                                      const std::string& default_path);

}  // namespace agentmesh
