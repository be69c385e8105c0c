#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentmesh/core.hpp"
#include "agentmesh/debugger.hpp"
#include "agentmesh/gateway.hpp"
#include "agentmesh/planner.hpp"
#include "agentmesh/prompts.hpp"
#include "agentmesh/reviewer.hpp"
#include "agentmesh/sandbox.hpp"
#include "agentmesh/transcript.hpp"

namespace agentmesh {

enum class BackendMode { Live, Record, Replay };

struct RunConfig {
    BackendMode backend_mode = BackendMode::Live;
    std::string cassette_path;  // required for Record and Replay
    std::optional<bool> strict_replay;  // unset: the cassette header decides
    std::string api_base_url = "https://api.openai.com/v1";
    std::map<AgentRole, std::string> model_per_role;  // falls back to model
    std::string model = "gpt-4";
    int max_fix_attempts = 3;
    SandboxConfig sandbox;
    std::string main_file = "main.py";
    std::optional<std::string> harness_file;  // host path
    std::string out_dir = "agentmesh-out";
    std::map<AgentRole, std::string> template_overrides;  // role -> host path
    std::size_t context_budget = 24'000;
};

struct RunReport {
    Plan plan;
    std::vector<std::pair<Subtask, TaskStatus>> statuses;  // one per task
    ReviewReport review;
    Transcript transcript;
    VirtualWorkspace final_workspace;
    bool incomplete = false;   // fatal abort before the pipeline finished
    std::string abort_reason;  // set when incomplete
};

// Backend factory per RunConfig. Live credentials come from AGENTMESH_API_KEY.
std::unique_ptr<Gateway> make_gateway(const RunConfig& config);

// The fixed plan -> (code -> debug)* -> review sequence. Every prompt,
// completion, execution, state update, and loop break lands in the
// transcript. EmptyPlan and replay-integrity failures abort with a partial
// report flagged incomplete.
RunReport run_pipeline(const UserRequest& request, const RunConfig& config);

// Same, with an externally constructed gateway (test seam).
RunReport run_pipeline(const UserRequest& request, const RunConfig& config,
                       Gateway& gateway);

// Writes <out>/src/..., plan.md, review.md, transcript.jsonl, report.json.
void write_outputs(const RunReport& report, const std::string& out_dir);

// 0: every task CleanPass/Fixed and verdict approved; 1: completed with
// NeedsAttention/Skipped tasks or a non-approved verdict; 2: fatal abort.
int exit_code_for(const RunReport& report);

}  // namespace agentmesh
