#include "agentmesh/transcript.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include <nlohmann/json.hpp>

namespace agentmesh {

std::string to_string(AgentId agent) {
    switch (agent) {
        case AgentId::Planner: return "planner";
        case AgentId::Coder: return "coder";
        case AgentId::Debugger: return "debugger";
        case AgentId::Reviewer: return "reviewer";
        case AgentId::Orchestrator: return "orchestrator";
        case AgentId::Sandbox: return "sandbox";
    }
    return "unknown";
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::PromptSent: return "prompt_sent";
        case EventKind::CompletionReceived: return "completion_received";
        case EventKind::ExecutionRun: return "execution_run";
        case EventKind::StateUpdate: return "state_update";
        case EventKind::LoopBreak: return "loop_break";
        case EventKind::Error: return "error";
    }
    return "unknown";
}

std::string rfc3339_utc_now() {
    using namespace std::chrono;
    auto now = system_clock::now();
    auto secs = time_point_cast<seconds>(now);
    auto millis = duration_cast<milliseconds>(now - secs).count();
    std::time_t t = system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec, static_cast<int>(millis));
    return buf;
}

TranscriptEvent& Transcript::emit(AgentId agent, EventKind kind,
                                  std::optional<int> task_index,
                                  std::string payload) {
    TranscriptEvent event;
    event.seq = events_.size();
    event.ts = rfc3339_utc_now();
    event.agent = agent;
    event.kind = kind;
    event.task_index = task_index;
    event.payload = std::move(payload);
    events_.push_back(std::move(event));
    return events_.back();
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& event : events_) {
        nlohmann::ordered_json record;
        record["seq"] = event.seq;
        record["ts"] = event.ts;
        record["agent"] = to_string(event.agent);
        record["event_kind"] = to_string(event.kind);
        if (event.task_index) {
            record["task_index"] = *event.task_index;
        } else {
            record["task_index"] = nullptr;
        }
        record["payload"] = event.payload;
        out += record.dump();
        out += '\n';
    }
    return out;
}

}  // namespace agentmesh
