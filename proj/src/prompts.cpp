#include "agentmesh/prompts.hpp"

#include <fstream>
#include <sstream>

namespace agentmesh {

PromptTemplate load_template_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open template file: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    auto marker = text.find("\n---\n");
    if (marker == std::string::npos) {
        throw TemplateError("template file lacks the \"---\" separator line: " +
                            path);
    }
    PromptTemplate tmpl;
    tmpl.system = text.substr(0, marker);
    tmpl.user = text.substr(marker + 5);
    // Drop one trailing newline the editor usually adds.
    if (!tmpl.user.empty() && tmpl.user.back() == '\n') tmpl.user.pop_back();
    return tmpl;
}

std::string substitute(const std::string& text, const std::string& key,
                       const std::string& value, bool required) {
    std::string placeholder = "{" + key + "}";
    auto pos = text.find(placeholder);
    if (pos == std::string::npos) {
        if (required) {
            throw TemplateError("template lacks the " + placeholder +
                                " placeholder");
        }
        return text;
    }
    std::string out = text;
    while (pos != std::string::npos) {
        out.replace(pos, placeholder.size(), value);
        pos = out.find(placeholder, pos + value.size());
    }
    return out;
}

PromptTemplate default_planner_template() {
    return {
        "You are a software planning assistant. Your job is to help plan a "
        "project given a description.",
        "Project goal: {request}.\n"
        "Please output a numbered list of development tasks, including "
        "design, implementation, and testing steps needed to accomplish this "
        "goal. Be thorough but concise."};
}

PromptTemplate default_coder_template() {
    return {
        "You are a senior software developer. Implement the requested "
        "component. Use best practices and comment where necessary. Output "
        "only code inside a fenced code block; do not include explanations "
        "unless as code comments. Name each target file with a first-line "
        "directive comment of the form \"# FILE: <path>\".",
        "Development plan:\n{plan}\n\n"
        "Implement the following component.\n"
        "Current task: {task}\n\n"
        "{context}"
        "Respond with only the code for this task."};
}

PromptTemplate default_debugger_template() {
    return {
        "You are a code debugging assistant. Given code and an error or "
        "failing test, you will identify the issue and propose a fix.",
        "Code:\n{code}\n\nError:\n{error}\n\n"
        "Identify the cause of the error and modify the code to fix it. "
        "Provide only the corrected code."};
}

PromptTemplate default_reviewer_template() {
    return {
        "You are a critical software reviewer performing final quality "
        "assurance. Summarize any problems or improvements in the following "
        "code and confirm if the requirements are satisfied.",
        "Original request:\n{request}\n\n"
        "Development plan:\n{plan}\n\n"
        "{integration}"
        "Codebase:\n{code}\n"
        "End your report with exactly one line reading either "
        "\"VERDICT: APPROVED\" or \"VERDICT: NEEDS_WORK\"."};
}

}  // namespace agentmesh
