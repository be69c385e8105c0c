#include "agentmesh/gateway.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include <httplib.h>

namespace agentmesh {

std::string to_string(MessageRole role) {
    switch (role) {
        case MessageRole::System: return "system";
        case MessageRole::User: return "user";
        case MessageRole::Assistant: return "assistant";
    }
    return "unknown";
}

std::string to_string(AgentRole role) {
    switch (role) {
        case AgentRole::Planner: return "planner";
        case AgentRole::Coder: return "coder";
        case AgentRole::Debugger: return "debugger";
        case AgentRole::Reviewer: return "reviewer";
    }
    return "unknown";
}

std::optional<AgentRole> agent_role_from_string(const std::string& name) {
    if (name == "planner") return AgentRole::Planner;
    if (name == "coder") return AgentRole::Coder;
    if (name == "debugger") return AgentRole::Debugger;
    if (name == "reviewer") return AgentRole::Reviewer;
    return std::nullopt;
}

std::string prompt_digest(const std::vector<ChatMessage>& messages) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    for (const auto& message : messages) {
        std::string role = to_string(message.role);
        EVP_DigestUpdate(ctx, role.data(), role.size());
        EVP_DigestUpdate(ctx, "\x1f", 1);
        EVP_DigestUpdate(ctx, message.content.data(), message.content.size());
        EVP_DigestUpdate(ctx, "\x1e", 1);
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx, digest, &length);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::chrono::milliseconds retry_schedule(int attempt) {
    if (attempt < 1) attempt = 1;
    std::int64_t delay = 500;
    for (int i = 1; i < attempt && delay < 8000; ++i) delay *= 2;
    if (delay > 8000) delay = 8000;
    return std::chrono::milliseconds(delay);
}

namespace {

void validate_request(const CompletionRequest& request) {
    if (request.messages.empty() ||
        request.messages.front().role != MessageRole::System) {
        throw GatewayError("first message must have role system");
    }
    for (const auto& message : request.messages) {
        if (message.role != MessageRole::Assistant && message.content.empty()) {
            throw GatewayError("system/user message content must be non-empty");
        }
    }
    if (request.params.temperature < 0.0 || request.params.temperature > 1.0) {
        throw GatewayError("temperature out of range [0, 1]");
    }
    if (request.params.max_output_tokens <= 0) {
        throw GatewayError("max_output_tokens must be positive");
    }
}

}  // namespace

std::string Gateway::complete(const CompletionRequest& request) {
    validate_request(request);
    return do_complete(request);
}

// --- live backend -----------------------------------------------------------

LiveGateway::LiveGateway(LiveConfig config) : config_(std::move(config)) {}

namespace {

struct ParsedUrl {
    std::string origin;       // scheme://host[:port]
    std::string path_prefix;  // e.g. "/v1"
};

ParsedUrl parse_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("malformed base url: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, ""};
    }
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

bool retriable_status(int status) {
    return status == 429 || status >= 500;
}

}  // namespace

std::string LiveGateway::do_complete(const CompletionRequest& request) {
    ParsedUrl url = parse_base_url(config_.base_url);

    nlohmann::json body;
    body["model"] = request.params.model_name;
    body["temperature"] = request.params.temperature;
    body["max_tokens"] = request.params.max_output_tokens;
    auto& messages = body["messages"] = nlohmann::json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", to_string(message.role)},
                            {"content", message.content}});
    }
    std::string payload = body.dump();

    int last_status = 0;
    std::string last_error;
    for (int attempt = 1; attempt <= 1 + kMaxRetries; ++attempt) {
        if (attempt > 1) {
            auto delay = retry_schedule(attempt - 1);
            if (config_.backoff_log) {
                config_.backoff_log->push_back(delay);
            } else {
                std::this_thread::sleep_for(delay);
            }
        }

        httplib::Client client(url.origin);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto result = client.Post(url.path_prefix + "/chat/completions",
                                  headers, payload, "application/json");
        if (!result) {
            last_status = 0;
            last_error = httplib::to_string(result.error());
            continue;
        }
        if (result->status == 200) {
            auto response = nlohmann::json::parse(result->body, nullptr, false);
            if (response.is_discarded()) {
                throw TransportError("unparseable completion response body");
            }
            try {
                return response.at("choices").at(0).at("message")
                    .at("content").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw TransportError(std::string("unexpected response shape: ") +
                                     e.what());
            }
        }
        last_status = result->status;
        last_error = result->body;
        if (!retriable_status(result->status)) {
            throw TransportError("non-retriable HTTP status " +
                                 std::to_string(result->status));
        }
    }
    if (last_status == 429) {
        throw RateLimitedError("rate limited, retry budget exhausted");
    }
    throw TransportError("retry budget exhausted (last status " +
                         std::to_string(last_status) + "): " + last_error);
}

// --- cassette I/O ------------------------------------------------------------

Cassette load_cassette(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open cassette: " + path);
    }
    Cassette cassette;
    std::string line;
    bool first = true;
    std::uint64_t expected_seq = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw IoError("malformed cassette line: " + path);
        }
        if (first && !record.contains("seq")) {
            cassette.lenient = record.value("lenient", false);
            first = false;
            continue;
        }
        first = false;
        CassetteRecord parsed;
        parsed.seq = record.at("seq").get<std::uint64_t>();
        auto role = agent_role_from_string(
            record.at("agent_role").get<std::string>());
        if (!role) {
            throw IoError("unknown agent_role in cassette: " + path);
        }
        parsed.agent_role = *role;
        parsed.prompt_sha256 = record.at("prompt_sha256").get<std::string>();
        parsed.response = record.at("response").get<std::string>();
        if (parsed.seq != expected_seq) {
            throw IoError("cassette seq values must be 0..n-1 in file order");
        }
        ++expected_seq;
        cassette.records.push_back(std::move(parsed));
    }
    return cassette;
}

void append_cassette_record(const std::string& path,
                            const CassetteRecord& record) {
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw IoError("cannot open cassette for append: " + path);
    }
    nlohmann::ordered_json json;
    json["seq"] = record.seq;
    json["agent_role"] = to_string(record.agent_role);
    json["prompt_sha256"] = record.prompt_sha256;
    json["response"] = record.response;
    out << json.dump() << '\n';
    if (!out) {
        throw IoError("cassette write failed: " + path);
    }
}

// --- record backend ----------------------------------------------------------

RecordingGateway::RecordingGateway(std::unique_ptr<Gateway> inner,
                                   std::string cassette_path)
    : inner_(std::move(inner)), cassette_path_(std::move(cassette_path)) {
    // Truncate any previous cassette so seq starts at 0.
    std::ofstream out(cassette_path_, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create cassette: " + cassette_path_);
    }
}

std::string RecordingGateway::do_complete(const CompletionRequest& request) {
    std::lock_guard lock(mutex_);
    std::string response = inner_->complete(request);
    CassetteRecord record;
    record.seq = next_seq_++;
    record.agent_role = request.agent_role;
    record.prompt_sha256 = prompt_digest(request.messages);
    record.response = response;
    append_cassette_record(cassette_path_, record);
    return response;
}

// --- replay backend ----------------------------------------------------------

ReplayGateway::ReplayGateway(std::string cassette_path,
                             std::optional<bool> strict_override) {
    Cassette cassette = load_cassette(cassette_path);
    records_ = std::move(cassette.records);
    strict_ = strict_override.value_or(!cassette.lenient);
}

std::size_t ReplayGateway::remaining() const {
    std::lock_guard lock(mutex_);
    return records_.size() - cursor_;
}

std::string ReplayGateway::do_complete(const CompletionRequest& request) {
    std::lock_guard lock(mutex_);
    if (cursor_ >= records_.size()) {
        throw CassetteExhaustedError("cassette exhausted at seq " +
                                     std::to_string(cursor_));
    }
    const CassetteRecord& record = records_[cursor_];
    if (record.agent_role != request.agent_role) {
        throw CassetteMismatchError(
            "cassette seq " + std::to_string(record.seq) + " has role " +
            to_string(record.agent_role) + ", request has " +
            to_string(request.agent_role));
    }
    if (strict_) {
        std::string digest = prompt_digest(request.messages);
        if (digest != record.prompt_sha256) {
            throw CassetteMismatchError(
                "cassette seq " + std::to_string(record.seq) +
                " prompt digest mismatch");
        }
    }
    ++cursor_;
    return record.response;
}

}  // namespace agentmesh
