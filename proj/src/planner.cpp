#include "agentmesh/planner.hpp"

#include <cctype>
#include <sstream>

namespace agentmesh {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// If the line opens a numbered item, returns the text after the marker.
bool numbered_line(const std::string& line, std::string* rest) {
    std::size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos) return false;
    std::size_t digits_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
        ++i;
    if (i == digits_start) return false;
    if (i >= line.size() || (line[i] != '.' && line[i] != ')')) return false;
    *rest = line.substr(i + 1);
    return true;
}

}  // namespace

std::vector<ChatMessage> build_planner_prompt(const UserRequest& request,
                                              const PromptTemplate& tmpl) {
    std::string user = substitute(tmpl.user, "request", request.text());
    return {{MessageRole::System, tmpl.system}, {MessageRole::User, user}};
}

Plan parse_plan(const std::string& completion) {
    Plan plan;
    plan.source_text = completion;

    std::istringstream stream(completion);
    std::string line;
    Subtask* current = nullptr;
    while (std::getline(stream, line)) {
        std::string rest;
        if (numbered_line(line, &rest)) {
            Subtask task;
            task.index = static_cast<int>(plan.tasks.size()) + 1;
            auto colon = rest.find(':');
            if (colon == std::string::npos) {
                task.title = trim(rest);
            } else {
                task.title = trim(rest.substr(0, colon));
                task.detail = trim(rest.substr(colon + 1));
            }
            if (task.title.empty()) {
                // A numbered marker with no title is noise, not a task.
                current = nullptr;
                continue;
            }
            plan.tasks.push_back(std::move(task));
            current = &plan.tasks.back();
        } else if (current) {
            std::string continuation = trim(line);
            if (continuation.empty()) continue;
            if (!current->detail.empty()) current->detail += '\n';
            current->detail += continuation;
        }
        // Non-numbered lines before the first task are preamble; dropped.
    }

    if (plan.tasks.empty()) {
        throw EmptyPlanError("planner completion contained no numbered tasks");
    }
    return plan;
}

std::string render_plan(const Plan& plan) {
    std::string out;
    for (const auto& task : plan.tasks) {
        out += std::to_string(task.index) + ". " + task.title;
        if (!task.detail.empty()) {
            out += ": " + task.detail;
        }
        out += '\n';
    }
    if (!out.empty()) out.pop_back();
    return out;
}

}  // namespace agentmesh
