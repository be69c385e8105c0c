#include "agentmesh/coder.hpp"

#include <regex>
#include <sstream>

namespace agentmesh {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

const std::regex kSignatureLine(
    R"(^\s*(def |class |async def |fn |func |function |struct |impl |interface |trait ))");

bool fence_open(const std::string& line) {
    std::string t = trim(line);
    return t.rfind("```", 0) == 0;
}

bool fence_close(const std::string& line) {
    return trim(line) == "```";
}

// Returns the directive path if the first non-blank fence line is a FILE
// directive, and strips that line from `body`.
std::string take_file_directive(std::vector<std::string>* body) {
    for (std::size_t i = 0; i < body->size(); ++i) {
        const std::string& line = (*body)[i];
        if (trim(line).empty()) continue;
        for (const char* marker : {"# FILE: ", "// FILE: "}) {
            if (line.rfind(marker, 0) == 0) {
                std::string path = trim(line.substr(std::string(marker).size()));
                body->erase(body->begin(), body->begin() + i + 1);
                return path;
            }
        }
        break;
    }
    return "";
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    if (!out.empty()) out.pop_back();
    return out;
}

void add_code(std::map<std::string, std::string>* files,
              const std::string& path, const std::string& code) {
    auto it = files->find(path);
    if (it == files->end()) {
        (*files)[path] = code;
    } else {
        it->second += "\n\n" + code;
    }
}

}  // namespace

std::string signature_digest(const VirtualWorkspace& workspace) {
    std::string out;
    for (const auto& [path, content] : workspace.files()) {
        out += "== FILE: " + path + " (signatures) ==\n";
        std::istringstream stream(content);
        std::string line;
        while (std::getline(stream, line)) {
            if (std::regex_search(line, kSignatureLine)) {
                out += trim(line);
                out += '\n';
            }
        }
        out += '\n';
    }
    return out;
}

std::vector<ChatMessage> build_coder_prompt(const Subtask& task,
                                            const Plan& plan,
                                            const VirtualWorkspace& workspace,
                                            const PromptTemplate& tmpl,
                                            std::size_t context_budget) {
    std::string task_line = std::to_string(task.index) + ". " + task.title;
    if (!task.detail.empty()) task_line += ": " + task.detail;

    std::string context;
    if (!workspace.empty()) {
        std::string full = render_codebase(workspace);
        if (full.size() <= context_budget) {
            context = "Existing code:\n" + full + "\n";
        } else {
            context = "Existing code (signatures only):\n" +
                      signature_digest(workspace) + "\n";
        }
    }

    std::string user = substitute(tmpl.user, "task", task_line);
    user = substitute(user, "plan", render_plan(plan), /*required=*/false);
    user = substitute(user, "context", context, /*required=*/false);
    return {{MessageRole::System, tmpl.system}, {MessageRole::User, user}};
}

CodeContribution extract_contribution(const std::string& completion,
                                      const std::string& default_path) {
    CodeContribution contribution;
    contribution.raw_completion = completion;

    std::vector<std::vector<std::string>> fences;
    {
        std::istringstream stream(completion);
        std::string line;
        bool in_fence = false;
        std::vector<std::string> body;
        while (std::getline(stream, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!in_fence && fence_open(line)) {
                in_fence = true;
                body.clear();
            } else if (in_fence && fence_close(line)) {
                in_fence = false;
                fences.push_back(body);
            } else if (in_fence) {
                body.push_back(line);
            }
        }
        // An unterminated fence still counts; models often drop the closer.
        if (in_fence) fences.push_back(body);
    }

    if (fences.empty()) {
        std::string code = trim(completion);
        if (code.empty()) {
            throw EmptyContributionError("completion contained no code");
        }
        contribution.files[default_path] = code;
        return contribution;
    }

    for (auto& body : fences) {
        std::string path = take_file_directive(&body);
        std::string code = trim(join_lines(body));
        if (code.empty()) continue;
        if (path.empty()) {
            add_code(&contribution.files, default_path, code);
        } else {
            if (!is_valid_workspace_path(path)) {
                throw InvalidPathError("FILE directive outside workspace: " +
                                       path);
            }
            add_code(&contribution.files, path, code);
        }
    }

    if (contribution.files.empty()) {
        throw EmptyContributionError("completion contained no code");
    }
    return contribution;
}

}  // namespace agentmesh
