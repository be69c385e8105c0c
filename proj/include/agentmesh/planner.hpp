#pragma once

#include <string>
#include <vector>

#include "agentmesh/core.hpp"
#include "agentmesh/gateway.hpp"
#include "agentmesh/prompts.hpp"

namespace agentmesh {

// System + User message pair asking for a numbered task list. The template's
// user text must contain the {request} placeholder.
std::vector<ChatMessage> build_planner_prompt(const UserRequest& request,
                                              const PromptTemplate& tmpl);

// Parses a numbered-list completion into a Plan. A line starting (after
// optional whitespace) with an integer followed by '.' or ')' opens a new
// subtask; the rest of that line up to the first ':' is the title, anything
// after the ':' plus following non-numbered lines (trimmed, newline-joined)
// is the detail. Indices are renumbered 1..n in order of appearance.
// Throws EmptyPlanError when no numbered line exists.
Plan parse_plan(const std::string& completion);

// Canonical one-line-per-task rendering: "<index>. <title>: <detail>",
// with ": <detail>" omitted when the detail is empty.
// parse_plan(render_plan(p)).tasks == p.tasks.
std::string render_plan(const Plan& plan);

}  // namespace agentmesh
