#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "agentmesh/sandbox.hpp"

using namespace agentmesh;
namespace fs = std::filesystem;

namespace {

SandboxConfig python_config(double timeout = 10.0) {
    SandboxConfig config;
    config.runtime_command = {"python3", "{file}"};
    config.timeout_seconds = timeout;
    return config;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("materialize writes the workspace tree and cleans up after itself") {
    fs::path root;
    {
        VirtualWorkspace ws;
        ws.put_file("a/b.src", "x");
        MaterializedDir dir = materialize(ws);
        root = dir.path();
        CHECK(fs::exists(root / "a" / "b.src"));
        CHECK(read_file(root / "a" / "b.src") == "x");
    }
    CHECK_FALSE(fs::exists(root));
}

TEST_CASE("materializing an empty workspace yields an empty directory") {
    VirtualWorkspace ws;
    MaterializedDir dir = materialize(ws);
    CHECK(fs::is_empty(dir.path()));
}

TEST_CASE("materialize round-trips random workspaces byte-exactly") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> chr(32, 126);
    for (int trial = 0; trial < 50; ++trial) {
        VirtualWorkspace ws;
        int files = 1 + static_cast<int>(rng() % 6);
        for (int f = 0; f < files; ++f) {
            std::string path = "d" + std::to_string(rng() % 3) + "/f" +
                               std::to_string(rng() % 10) + ".txt";
            std::string content;
            int len = static_cast<int>(rng() % 200);
            for (int c = 0; c < len; ++c) content += static_cast<char>(chr(rng));
            content += "\n";
            ws.put_file(path, content);
        }
        MaterializedDir dir = materialize(ws);
        for (const auto& [path, content] : ws.files()) {
            CHECK(read_file(dir.path() / path) == content);
        }
    }
}

TEST_CASE("a silent zero-exit program yields a clean outcome") {
    VirtualWorkspace ws;
    ws.put_file("main.py", "");
    MaterializedDir dir = materialize(ws);
    ExecutionOutcome outcome = execute(dir, "main.py", python_config());
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.stdout_text.empty());
    CHECK(outcome.stderr_text.empty());
    CHECK_FALSE(outcome.timed_out);
    CHECK(outcome.passed());
}

TEST_CASE("stdout and stderr are captured separately") {
    VirtualWorkspace ws;
    ws.put_file("main.py",
                "import sys\nprint('to out')\nprint('to err', file=sys.stderr)\n"
                "sys.exit(3)\n");
    MaterializedDir dir = materialize(ws);
    ExecutionOutcome outcome = execute(dir, "main.py", python_config());
    CHECK(outcome.exit_code == 3);
    CHECK(outcome.stdout_text == "to out\n");
    CHECK(outcome.stderr_text == "to err\n");
    CHECK_FALSE(outcome.passed());
}

TEST_CASE("an unhandled exception fails with a traceback on stderr") {
    VirtualWorkspace ws;
    ws.put_file("main.py", "open('tasks.txt')\n");
    MaterializedDir dir = materialize(ws);
    ExecutionOutcome outcome = execute(dir, "main.py", python_config());
    REQUIRE(outcome.exit_code.has_value());
    CHECK(*outcome.exit_code != 0);
    CHECK(outcome.stderr_text.find("FileNotFoundError") != std::string::npos);
}

TEST_CASE("a non-terminating program is killed at the timeout") {
    VirtualWorkspace ws;
    ws.put_file("loop.py", "while True:\n    pass\n");
    MaterializedDir dir = materialize(ws);
    ExecutionOutcome outcome = execute(dir, "loop.py", python_config(2.0));
    CHECK(outcome.timed_out);
    CHECK(outcome.duration_seconds >= 2.0);
    CHECK(outcome.duration_seconds < 3.0);
    CHECK_FALSE(outcome.exit_code.has_value());
}

TEST_CASE("stdin scripting feeds lines then EOF") {
    VirtualWorkspace ws;
    ws.put_file("echo.py",
                "import sys\nfor line in sys.stdin:\n"
                "    sys.stdout.write(line)\n");
    MaterializedDir dir = materialize(ws);
    SandboxConfig config = python_config();
    config.stdin_script = {"add milk", "done 1", "quit"};
    ExecutionOutcome outcome = execute(dir, "echo.py", config);
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.stdout_text == "add milk\ndone 1\nquit\n");
}

TEST_CASE("capture limit truncates runaway output with a marker") {
    VirtualWorkspace ws;
    ws.put_file("spam.py", "print('A' * 100000)\n");
    MaterializedDir dir = materialize(ws);
    SandboxConfig config = python_config();
    config.capture_limit = 1024;
    ExecutionOutcome outcome = execute(dir, "spam.py", config);
    CHECK(outcome.stdout_text.size() <= 1024 + std::string(kTruncationMarker).size());
    CHECK(outcome.stdout_text.find(kTruncationMarker) != std::string::npos);
}

TEST_CASE("environment is scrubbed to the allowlist") {
    setenv("AGENTMESH_API_KEY", "super-secret-value", 1);
    setenv("SOME_HOST_ONLY_VAR", "leakme", 1);
    VirtualWorkspace ws;
    ws.put_file("env.py",
                "import os\nfor k, v in sorted(os.environ.items()):\n"
                "    print(f'{k}={v}')\n");
    MaterializedDir dir = materialize(ws);
    ExecutionOutcome outcome = execute(dir, "env.py", python_config());
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.stdout_text.find("AGENTMESH_API_KEY") == std::string::npos);
    CHECK(outcome.stdout_text.find("super-secret-value") == std::string::npos);
    CHECK(outcome.stdout_text.find("SOME_HOST_ONLY_VAR") == std::string::npos);
    CHECK(outcome.stdout_text.find("PATH=") != std::string::npos);
}

TEST_CASE("sandbox runs do not touch files outside their directory") {
    // Sentinel tree snapshotted before and after.
    fs::path sentinel = fs::temp_directory_path() / "agentmesh-sentinel";
    fs::remove_all(sentinel);
    fs::create_directories(sentinel / "inner");
    std::ofstream(sentinel / "a.txt") << "alpha";
    std::ofstream(sentinel / "inner" / "b.txt") << "beta";

    auto snapshot = [&] {
        std::map<std::string, std::string> state;
        for (auto& entry : fs::recursive_directory_iterator(sentinel)) {
            if (entry.is_regular_file()) {
                state[entry.path().string()] = read_file(entry.path());
            }
        }
        return state;
    };
    auto before = snapshot();

    VirtualWorkspace ws;
    ws.put_file("writer.py",
                "open('local.txt', 'w').write('inside the sandbox only')\n");
    {
        MaterializedDir dir = materialize(ws);
        ExecutionOutcome outcome = execute(dir, "writer.py", python_config());
        CHECK(outcome.exit_code == 0);
        CHECK(fs::exists(dir.path() / "local.txt"));
    }
    CHECK(snapshot() == before);
    fs::remove_all(sentinel);
}

TEST_CASE("a missing runtime command raises SpawnError") {
    VirtualWorkspace ws;
    ws.put_file("main.py", "");
    MaterializedDir dir = materialize(ws);
    SandboxConfig config;
    config.runtime_command = {"definitely-not-a-real-binary", "{file}"};
    CHECK_THROWS_AS(execute(dir, "main.py", config), SpawnError);
}

TEST_CASE("runtime command must contain exactly one {file} placeholder") {
    VirtualWorkspace ws;
    ws.put_file("main.py", "");
    MaterializedDir dir = materialize(ws);
    SandboxConfig config;
    config.runtime_command = {"python3"};
    CHECK_THROWS_AS(execute(dir, "main.py", config), SpawnError);
    config.runtime_command = {"python3", "{file}", "{file}"};
    CHECK_THROWS_AS(execute(dir, "main.py", config), SpawnError);
}

TEST_CASE("timeout kills the whole process tree") {
    VirtualWorkspace ws;
    ws.put_file("parent.py",
                "import subprocess, sys, time\n"
                "child = subprocess.Popen([sys.executable, '-c', "
                "'import time; time.sleep(60)'])\n"
                "print(child.pid, flush=True)\n"
                "time.sleep(60)\n");
    MaterializedDir dir = materialize(ws);
    ExecutionOutcome outcome = execute(dir, "parent.py", python_config(1.0));
    CHECK(outcome.timed_out);
    int child_pid = std::stoi(outcome.stdout_text);
    // The grandchild must be dead: either fully gone or an unreaped zombie
    // (its reaper may lag). A live sleeper would show state S.
    std::ifstream stat("/proc/" + std::to_string(child_pid) + "/stat");
    std::string line;
    std::getline(stat, line);
    bool gone = !stat.good() && line.empty();
    bool zombie = line.find(") Z") != std::string::npos;
    CHECK((gone || zombie));
}

TEST_CASE("scrub_outcome replaces the directory path in both streams") {
    ExecutionOutcome outcome;
    outcome.stdout_text = "saw /tmp/agentmesh-abc123/main.py";
    outcome.stderr_text = "File \"/tmp/agentmesh-abc123/main.py\", line 1";
    scrub_outcome(&outcome, "/tmp/agentmesh-abc123");
    CHECK(outcome.stdout_text == "saw <sandbox>/main.py");
    CHECK(outcome.stderr_text == "File \"<sandbox>/main.py\", line 1");
}
