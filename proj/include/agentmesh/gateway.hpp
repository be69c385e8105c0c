#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentmesh/errors.hpp"

namespace agentmesh {

enum class MessageRole { System, User, Assistant };

std::string to_string(MessageRole role);

struct ChatMessage {
    MessageRole role = MessageRole::User;
    std::string content;  // may be empty only for Assistant placeholders
};

enum class AgentRole { Planner, Coder, Debugger, Reviewer };

std::string to_string(AgentRole role);
std::optional<AgentRole> agent_role_from_string(const std::string& name);

struct CompletionParams {
    std::string model_name = "gpt-4";
    double temperature = 0.0;           // in [0, 1]
    int max_output_tokens = 2048;       // > 0
};

struct CompletionRequest {
    AgentRole agent_role = AgentRole::Planner;
    std::vector<ChatMessage> messages;  // first message must be System
    CompletionParams params;
};

// Lowercase hex SHA-256 of role + "\x1f" + content + "\x1e" per message,
// concatenated in order. Role is the lowercase name ("system", "user",
// "assistant").
std::string prompt_digest(const std::vector<ChatMessage>& messages);

// Exponential backoff: 0.5 s * 2^(attempt-1), capped at 8 s. attempt >= 1.
std::chrono::milliseconds retry_schedule(int attempt);

inline constexpr int kMaxRetries = 4;

struct CassetteRecord {
    std::uint64_t seq = 0;
    AgentRole agent_role = AgentRole::Planner;
    std::string prompt_sha256;  // 64 lowercase hex chars
    std::string response;
};

// One completion backend (live, record, or replay). complete() validates the
// request invariants before dispatch.
class Gateway {
  public:
    virtual ~Gateway() = default;

    std::string complete(const CompletionRequest& request);

  protected:
    virtual std::string do_complete(const CompletionRequest& request) = 0;
};

struct LiveConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;  // usually from AGENTMESH_API_KEY
    std::chrono::milliseconds timeout{60'000};
    // Test hook: when set, sleeps are skipped and delays recorded here.
    std::vector<std::chrono::milliseconds>* backoff_log = nullptr;
};

// Chat-completions-style HTTP backend with bounded retry on 429/5xx and
// transport failures. 400/401/403 fail immediately.
class LiveGateway : public Gateway {
  public:
    explicit LiveGateway(LiveConfig config);

  protected:
    std::string do_complete(const CompletionRequest& request) override;

  private:
    LiveConfig config_;
};

// Delegates to an inner backend and appends one CassetteRecord per call to
// the cassette file. Calls are serialized; seq values are 0..n-1.
class RecordingGateway : public Gateway {
  public:
    RecordingGateway(std::unique_ptr<Gateway> inner, std::string cassette_path);

  protected:
    std::string do_complete(const CompletionRequest& request) override;

  private:
    std::unique_ptr<Gateway> inner_;
    std::string cassette_path_;
    std::uint64_t next_seq_ = 0;
    std::mutex mutex_;
};

// Positional playback of a cassette. Strict mode validates agent_role and
// prompt digest per record; lenient mode validates agent_role only.
class ReplayGateway : public Gateway {
  public:
    // strict_override forces the mode; otherwise the cassette's own lenient
    // header (if any) decides, defaulting to strict.
    ReplayGateway(std::string cassette_path,
                  std::optional<bool> strict_override = std::nullopt);

    bool strict() const { return strict_; }
    std::size_t remaining() const;

  protected:
    std::string do_complete(const CompletionRequest& request) override;

  private:
    std::vector<CassetteRecord> records_;
    std::size_t cursor_ = 0;
    bool strict_ = true;
    mutable std::mutex mutex_;
};

// Cassette file I/O: line-delimited JSON, fields seq, agent_role,
// prompt_sha256, response. An optional leading header line {"lenient": true}
// marks hand-authored fixtures.
struct Cassette {
    bool lenient = false;
    std::vector<CassetteRecord> records;
};

Cassette load_cassette(const std::string& path);
void append_cassette_record(const std::string& path,
                            const CassetteRecord& record);

}  // namespace agentmesh
