#pragma once

#include <string>
#include <vector>

#include "agentmesh/errors.hpp"
#include "agentmesh/gateway.hpp"

namespace agentmesh {

// Role prompt pair. Template files are UTF-8 text: system text, a line
// consisting of "---", then the user text with its placeholders.
struct PromptTemplate {
    std::string system;
    std::string user;
};

PromptTemplate load_template_file(const std::string& path);

// Substitutes every "{key}" occurrence. Throws TemplateError if a required
// placeholder is absent from the template text.
std::string substitute(const std::string& text, const std::string& key,
                       const std::string& value, bool required = true);

// Embedded defaults per agent role.
PromptTemplate default_planner_template();
PromptTemplate default_coder_template();
PromptTemplate default_debugger_template();
PromptTemplate default_reviewer_template();

}  // namespace agentmesh
