#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace agentmesh {

enum class AgentId { Planner, Coder, Debugger, Reviewer, Orchestrator, Sandbox };

enum class EventKind {
    PromptSent,
    CompletionReceived,
    ExecutionRun,
    StateUpdate,
    LoopBreak,
    Error,
};

std::string to_string(AgentId agent);
std::string to_string(EventKind kind);

struct TranscriptEvent {
    std::uint64_t seq = 0;  // strictly increasing, gap-free within one run
    std::string ts;         // RFC 3339 UTC
    AgentId agent = AgentId::Orchestrator;
    EventKind kind = EventKind::StateUpdate;
    std::optional<int> task_index;
    std::string payload;
};

// Ordered event log of one pipeline run. Owns the sequence counter.
class Transcript {
  public:
    TranscriptEvent& emit(AgentId agent, EventKind kind,
                          std::optional<int> task_index, std::string payload);

    const std::vector<TranscriptEvent>& events() const { return events_; }

    // One JSON object per line, fields: seq, ts, agent, event_kind,
    // task_index (null allowed), payload.
    std::string to_jsonl() const;

  private:
    std::vector<TranscriptEvent> events_;
};

// Current time as RFC 3339 UTC with millisecond precision.
std::string rfc3339_utc_now();

}  // namespace agentmesh
