#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentmesh/errors.hpp"

namespace agentmesh {

// Natural-language request driving one pipeline run. Text is non-empty after
// trimming; the constructor enforces it.
class UserRequest {
  public:
    explicit UserRequest(std::string text);
    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

struct Subtask {
    int index = 0;       // 1-based, consecutive within a Plan
    std::string title;   // non-empty
    std::string detail;  // may be empty

    bool operator==(const Subtask&) const = default;
};

struct Plan {
    std::vector<Subtask> tasks;  // never empty
    std::string source_text;     // raw planner completion this was parsed from
};

// Returns false for absolute paths, empty paths, and any path containing a
// ".." segment.
bool is_valid_workspace_path(const std::string& path);

// Shared project state: filename -> latest code text, plus non-code
// artifacts (e.g. the plan) kept out of the executable file set.
class VirtualWorkspace {
  public:
    using FileMap = std::map<std::string, std::string>;

    const FileMap& files() const { return files_; }
    const FileMap& artifacts() const { return artifacts_; }

    bool empty() const { return files_.empty(); }

    // Throws InvalidPathError on a path outside the workspace namespace.
    void put_file(const std::string& path, std::string content);
    void put_artifact(const std::string& name, std::string content);

    const std::string* find_file(const std::string& path) const;

  private:
    FileMap files_;
    FileMap artifacts_;
};

// Last-writer-wins merge of `update` into `workspace`. All update paths must
// satisfy the workspace path rules (InvalidPathError otherwise).
VirtualWorkspace apply_update(VirtualWorkspace workspace,
                              const VirtualWorkspace::FileMap& update);

// Deterministic concatenation of the workspace files in lexicographic path
// order: "== FILE: <path> ==\n<content>\n\n" per file.
std::string render_codebase(const VirtualWorkspace& workspace);

enum class TaskState { CleanPass, Fixed, NeedsAttention, Skipped };

struct TaskStatus {
    TaskState state = TaskState::CleanPass;
    int fix_attempts = 0;  // Fixed only, >= 1
    std::string reason;    // NeedsAttention / Skipped only

    static TaskStatus clean_pass() { return {TaskState::CleanPass, 0, {}}; }
    static TaskStatus fixed(int attempts) {
        return {TaskState::Fixed, attempts, {}};
    }
    static TaskStatus needs_attention(std::string reason) {
        return {TaskState::NeedsAttention, 0, std::move(reason)};
    }
    static TaskStatus skipped(std::string reason) {
        return {TaskState::Skipped, 0, std::move(reason)};
    }

    bool ok() const {
        return state == TaskState::CleanPass || state == TaskState::Fixed;
    }

    bool operator==(const TaskStatus&) const = default;
};

std::string to_string(TaskState state);

}  // namespace agentmesh
