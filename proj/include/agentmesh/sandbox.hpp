#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agentmesh/core.hpp"

namespace agentmesh {

struct ExecutionOutcome {
    std::optional<int> exit_code;  // absent when the process was killed
    std::string stdout_text;       // truncated to the capture limit
    std::string stderr_text;       // truncated to the capture limit
    double duration_seconds = 0.0;
    bool timed_out = false;

    bool passed() const { return !timed_out && exit_code == 0; }
};

struct SandboxConfig {
    // Argument vector with exactly one "{file}" placeholder.
    std::vector<std::string> runtime_command = {"python3", "{file}"};
    double timeout_seconds = 10.0;
    std::size_t capture_limit = 64 * 1024;  // per stream
    std::vector<std::string> stdin_script;  // lines fed to stdin, then EOF
};

inline constexpr const char* kTruncationMarker = "\xE2\x80\xA6[truncated]";

// Fresh temporary directory holding the workspace files; removed on
// destruction.
class MaterializedDir {
  public:
    explicit MaterializedDir(std::filesystem::path root) : root_(std::move(root)) {}
    ~MaterializedDir();

    MaterializedDir(MaterializedDir&& other) noexcept;
    MaterializedDir& operator=(MaterializedDir&&) = delete;
    MaterializedDir(const MaterializedDir&) = delete;

    const std::filesystem::path& path() const { return root_; }

  private:
    std::filesystem::path root_;
};

// Writes the workspace files (UTF-8, paths preserved) into a fresh temp
// directory. Throws IoError on write failure.
MaterializedDir materialize(const VirtualWorkspace& workspace);

// Runs runtime_command with "{file}" replaced by entry_file, cwd = dir, a
// minimal environment allowlist (PATH, HOME, locale), scripted stdin, and a
// wall-clock timeout that kills the whole process group.
ExecutionOutcome execute(const MaterializedDir& dir,
                         const std::string& entry_file,
                         const SandboxConfig& config);

// Raised from a signal handler; makes any in-flight execute() kill its child
// and return promptly.
void sandbox_request_interrupt();
bool sandbox_interrupted();

// Replaces every occurrence of the materialized directory path in the
// captured streams with "<sandbox>", so prompts and transcripts stay stable
// across runs.
void scrub_outcome(ExecutionOutcome* outcome, const std::string& dir_path);

}  // namespace agentmesh
