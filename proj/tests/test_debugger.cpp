#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "agentmesh/debugger.hpp"

using namespace agentmesh;

namespace {

// Queue-of-responses backend for driving the fix loop directly.
class ScriptedGateway : public Gateway {
  public:
    explicit ScriptedGateway(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}

    int calls() const { return calls_; }

  protected:
    std::string do_complete(const CompletionRequest&) override {
        if (static_cast<std::size_t>(calls_) >= responses_.size()) {
            throw TransportError("script exhausted");
        }
        return responses_[calls_++];
    }

  private:
    std::vector<std::string> responses_;
    int calls_ = 0;
};

SandboxConfig python_sandbox() {
    SandboxConfig config;
    config.runtime_command = {"python3", "{file}"};
    config.timeout_seconds = 10.0;
    return config;
}

DebugTaskOptions options_with(int max_fix_attempts) {
    DebugTaskOptions options;
    options.max_fix_attempts = max_fix_attempts;
    options.sandbox = python_sandbox();
    return options;
}

CodeContribution contribution_of(const std::string& path,
                                 const std::string& code) {
    CodeContribution contribution;
    contribution.files[path] = code;
    contribution.raw_completion = code;
    return contribution;
}

// The paper's mark_done scenario: two tasks, mark the first done, assert.
const char* kMarkDoneHarness =
    "class Task:\n"
    "    def __init__(self, description, done=False):\n"
    "        self.description = description\n"
    "        self.done = done\n"
    "tasks = [Task('a'), Task('b')]\n";

const char* kBuggyMarkDone =
    "def mark_done(index: int):\n"
    "    tasks[index].done = True\n"
    "mark_done(1)\n"
    "assert tasks[0].done, 'marked the wrong task done'\n";

const char* kFixedMarkDone =
    "def mark_done(index: int):\n"
    "    if 1 <= index <= len(tasks):\n"
    "        tasks[index-1].done = True\n"
    "    else:\n"
    "        print('Invalid task number.')\n"
    "mark_done(1)\n"
    "assert tasks[0].done, 'marked the wrong task done'\n";

}  // namespace

TEST_CASE("verify passes a zero-exit workspace and fails a raising one") {
    VirtualWorkspace ws;
    ws.put_file("main.py", "x = 1\n");
    VerifyResult ok = verify(ws, "main.py", python_sandbox());
    CHECK(ok.passed);

    ws.put_file("main.py", "raise RuntimeError('boom')\n");
    VerifyResult bad = verify(ws, "main.py", python_sandbox());
    CHECK_FALSE(bad.passed);
    CHECK_FALSE(bad.outcome.stderr_text.empty());
    // The temp directory path never leaks into the outcome.
    CHECK(bad.outcome.stderr_text.find("/tmp/agentmesh-") == std::string::npos);
    CHECK(bad.outcome.stderr_text.find("<sandbox>") != std::string::npos);
}

TEST_CASE("verify leaves the workspace argument untouched") {
    VirtualWorkspace ws;
    ws.put_file("main.py", "x = 1\n");
    VirtualWorkspace copy = ws;
    verify(ws, "main.py", python_sandbox());
    CHECK(ws.files() == copy.files());
}

TEST_CASE("the paper's off-by-one harness fails against the unfixed code") {
    VirtualWorkspace ws;
    ws.put_file("main.py", std::string(kMarkDoneHarness) + kBuggyMarkDone);
    VerifyResult result = verify(ws, "main.py", python_sandbox());
    CHECK_FALSE(result.passed);
    CHECK(result.outcome.stderr_text.find("marked the wrong task done") !=
          std::string::npos);
}

TEST_CASE("fix prompt carries the code and the error text") {
    ExecutionOutcome outcome;
    outcome.exit_code = 1;
    outcome.stderr_text = "Traceback (most recent call last):\nKeyError: 'x'";
    auto messages = build_fix_prompt("def f():\n    pass", outcome,
                                     default_debugger_template());
    REQUIRE(messages.size() == 2);
    CHECK(messages[0].role == MessageRole::System);
    CHECK(messages[1].content.find("def f():") != std::string::npos);
    CHECK(messages[1].content.find("KeyError: 'x'") != std::string::npos);
    CHECK(messages[1].content.find("Provide only the corrected code") !=
          std::string::npos);
}

TEST_CASE("a timed-out outcome produces the fixed timeout notice") {
    ExecutionOutcome outcome;
    outcome.timed_out = true;
    auto messages =
        build_fix_prompt("code", outcome, default_debugger_template());
    CHECK(messages[1].content.find(
              "did not terminate within the time limit") != std::string::npos);
}

TEST_CASE("a FileNotFoundError outcome lands in the prompt verbatim") {
    VirtualWorkspace ws;
    ws.put_file("main.py", "tasks = []\nopen('tasks.txt')\n");
    VerifyResult result = verify(ws, "main.py", python_sandbox());
    REQUIRE_FALSE(result.passed);
    auto messages = build_fix_prompt(*ws.find_file("main.py"), result.outcome,
                                     default_debugger_template());
    CHECK(messages[1].content.find("FileNotFoundError") != std::string::npos);
}

TEST_CASE("normalize_code strips trailing whitespace and blank tails") {
    CHECK(normalize_code("a  \nb\t\n\n\n") == "a\nb\n");
    CHECK(normalize_code("a\nb") == normalize_code("a  \nb\n\n"));
    CHECK(normalize_code("a\nb") != normalize_code("a\n b"));
}

TEST_CASE("first verification passing is a CleanPass with one round") {
    ScriptedGateway gateway({});
    VirtualWorkspace ws;
    DebugResult result =
        debug_task(ws, contribution_of("main.py", "print('hello')\n"),
                   "main.py", gateway, options_with(3));
    CHECK(result.status == TaskStatus::clean_pass());
    CHECK(result.verification_rounds == 1);
    CHECK(result.fix_attempts == 0);
    CHECK(gateway.calls() == 0);
    CHECK(result.final_files.at("main.py") == "print('hello')\n");
}

TEST_CASE("one fix round turns the off-by-one failure into Fixed(1)") {
    ScriptedGateway gateway({std::string("```python\n") + kMarkDoneHarness +
                             kFixedMarkDone + "```"});
    VirtualWorkspace ws;
    DebugResult result = debug_task(
        ws,
        contribution_of("main.py",
                        std::string(kMarkDoneHarness) + kBuggyMarkDone),
        "main.py", gateway, options_with(3));
    CHECK(result.status == TaskStatus::fixed(1));
    CHECK(result.verification_rounds == 2);
    CHECK(result.fix_attempts == 1);
    CHECK(result.final_files.at("main.py").find("tasks[index-1].done = True") !=
          std::string::npos);
}

TEST_CASE("two identical broken fixes break the loop without a third verify") {
    // Oracle: hand-traced loop. verify(broken) fails -> fix A (differs,
    // applied) -> verify(A) fails -> fix A again -> identical, stop.
    std::string broken_a = "```\nraise ValueError('still broken A')\n```";
    ScriptedGateway gateway({broken_a, broken_a});
    VirtualWorkspace ws;
    DebugResult result = debug_task(
        ws, contribution_of("main.py", "raise ValueError('original')\n"),
        "main.py", gateway, options_with(5));
    CHECK(result.status == TaskStatus::needs_attention("identical fix"));
    CHECK(result.fix_attempts == 2);
    CHECK(result.verification_rounds == 2);
    CHECK(gateway.calls() == 2);
    // final_files is the last verified candidate, not the unverified repeat.
    CHECK(result.final_files.at("main.py").find("still broken A") !=
          std::string::npos);
}

TEST_CASE("the retry limit caps gateway calls and verifications") {
    ScriptedGateway gateway({"```\nraise ValueError('v1')\n```",
                             "```\nraise ValueError('v2')\n```",
                             "```\nraise ValueError('v3')\n```",
                             "```\nraise ValueError('v4')\n```"});
    VirtualWorkspace ws;
    DebugResult result = debug_task(
        ws, contribution_of("main.py", "raise ValueError('v0')\n"), "main.py",
        gateway, options_with(3));
    CHECK(result.status == TaskStatus::needs_attention("retry limit"));
    CHECK(result.fix_attempts == 3);
    CHECK(result.verification_rounds == 4);
    CHECK(gateway.calls() == 3);
}

TEST_CASE("max_fix_attempts zero never calls the gateway") {
    ScriptedGateway gateway({"```\nx = 1\n```"});
    VirtualWorkspace ws;
    DebugResult result =
        debug_task(ws, contribution_of("main.py", "raise ValueError('x')\n"),
                   "main.py", gateway, options_with(0));
    CHECK(result.status == TaskStatus::needs_attention("retry limit"));
    CHECK(gateway.calls() == 0);
    CHECK(result.verification_rounds == 1);
}

TEST_CASE("gateway failures abort the task as a backend error") {
    ScriptedGateway gateway({});
    VirtualWorkspace ws;
    DebugResult result =
        debug_task(ws, contribution_of("main.py", "raise ValueError('x')\n"),
                   "main.py", gateway, options_with(3));
    CHECK(result.status.state == TaskState::NeedsAttention);
    CHECK(result.status.reason.find("backend error") == 0);
}

TEST_CASE("a harness overrides the verification entry point") {
    ScriptedGateway gateway({});
    VirtualWorkspace ws;
    DebugTaskOptions options = options_with(3);
    options.harness = Harness{"check.py",
                              "import main  # noqa\nraise SystemExit(0)\n"};
    // The module itself would loop forever under __main__; the harness only
    // imports it.
    DebugResult result = debug_task(
        ws,
        contribution_of("main.py",
                        "def f():\n    return 1\n"
                        "if __name__ == '__main__':\n"
                        "    raise RuntimeError('direct run')\n"),
        "main.py", gateway, options);
    CHECK(result.status == TaskStatus::clean_pass());
}

TEST_CASE("termination bound holds over randomized fix scripts") {
    // Criterion-style property at unit scale: for random pass/fail scripts,
    // gateway calls <= max and verifications <= max + 1.
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        int max_fix = static_cast<int>(rng() % 4);
        std::vector<std::string> responses;
        int planned = static_cast<int>(rng() % 6);
        for (int i = 0; i < planned; ++i) {
            bool passes = rng() % 2 == 0;
            bool repeat = !passes && rng() % 3 == 0 && !responses.empty();
            if (repeat) {
                responses.push_back(responses.back());
            } else if (passes) {
                responses.push_back("```\nx = " + std::to_string(i) + "\n```");
            } else {
                responses.push_back("```\nraise ValueError('f" +
                                    std::to_string(i) + "')\n```");
            }
        }
        ScriptedGateway gateway(responses);
        VirtualWorkspace ws;
        DebugResult result = debug_task(
            ws, contribution_of("main.py", "raise ValueError('seed')\n"),
            "main.py", gateway, options_with(max_fix));
        CHECK(gateway.calls() <= max_fix);
        CHECK(result.verification_rounds <= max_fix + 1);
        CHECK(result.fix_attempts <= max_fix);
    }
}
