#include "agentmesh/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace agentmesh {

namespace {

std::string trim_copy(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

UserRequest::UserRequest(std::string text) : text_(std::move(text)) {
    if (trim_copy(text_).empty()) {
        throw Error("user request must be non-empty");
    }
}

bool is_valid_workspace_path(const std::string& path) {
    if (path.empty()) return false;
    if (path.front() == '/' || path.front() == '\\') return false;
    // Windows-style drive prefix counts as absolute too.
    if (path.size() >= 2 && path[1] == ':') return false;
    std::string segment;
    std::istringstream stream(path);
    while (std::getline(stream, segment, '/')) {
        if (segment == "..") return false;
    }
    return true;
}

void VirtualWorkspace::put_file(const std::string& path, std::string content) {
    if (!is_valid_workspace_path(path)) {
        throw InvalidPathError("invalid workspace path: " + path);
    }
    files_[path] = std::move(content);
}

void VirtualWorkspace::put_artifact(const std::string& name,
                                    std::string content) {
    artifacts_[name] = std::move(content);
}

const std::string* VirtualWorkspace::find_file(const std::string& path) const {
    auto it = files_.find(path);
    return it == files_.end() ? nullptr : &it->second;
}

VirtualWorkspace apply_update(VirtualWorkspace workspace,
                              const VirtualWorkspace::FileMap& update) {
    for (const auto& [path, content] : update) {
        workspace.put_file(path, content);
    }
    return workspace;
}

std::string render_codebase(const VirtualWorkspace& workspace) {
    std::string out;
    for (const auto& [path, content] : workspace.files()) {
        out += "== FILE: " + path + " ==\n";
        out += content;
        out += "\n\n";
    }
    return out;
}

std::string to_string(TaskState state) {
    switch (state) {
        case TaskState::CleanPass: return "clean_pass";
        case TaskState::Fixed: return "fixed";
        case TaskState::NeedsAttention: return "needs_attention";
        case TaskState::Skipped: return "skipped";
    }
    return "unknown";
}

}  // namespace agentmesh
