#include "agentmesh/sandbox.hpp"

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace agentmesh {

namespace fs = std::filesystem;

namespace {

// Set by the CLI's SIGINT handler; execute() kills the child when raised.
std::atomic<bool> g_interrupted{false};

constexpr const char* kEnvAllowlist[] = {"PATH", "HOME", "LANG", "LC_ALL",
                                         "LC_CTYPE"};

void append_capped(std::string* sink, const char* data, ssize_t n,
                   std::size_t limit, bool* truncated) {
    if (*truncated) return;
    std::size_t room = limit > sink->size() ? limit - sink->size() : 0;
    if (static_cast<std::size_t>(n) <= room) {
        sink->append(data, n);
    } else {
        sink->append(data, room);
        sink->append(kTruncationMarker);
        *truncated = true;
    }
}

}  // namespace

void sandbox_request_interrupt() { g_interrupted = true; }

bool sandbox_interrupted() { return g_interrupted.load(); }

MaterializedDir::~MaterializedDir() {
    if (!root_.empty()) {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }
}

MaterializedDir::MaterializedDir(MaterializedDir&& other) noexcept
    : root_(std::move(other.root_)) {
    other.root_.clear();
}

MaterializedDir materialize(const VirtualWorkspace& workspace) {
    std::string pattern =
        (fs::temp_directory_path() / "agentmesh-XXXXXX").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) {
        throw IoError(std::string("mkdtemp failed: ") + std::strerror(errno));
    }
    MaterializedDir dir{fs::path(buf.data())};

    for (const auto& [path, content] : workspace.files()) {
        fs::path target = dir.path() / path;
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        std::ofstream out(target, std::ios::binary);
        out << content;
        if (!out) {
            throw IoError("cannot write workspace file: " + target.string());
        }
    }
    return dir;
}

ExecutionOutcome execute(const MaterializedDir& dir,
                         const std::string& entry_file,
                         const SandboxConfig& config) {
    int placeholders = 0;
    std::vector<std::string> argv_strings;
    for (const auto& arg : config.runtime_command) {
        if (arg == "{file}") {
            ++placeholders;
            argv_strings.push_back(entry_file);
        } else {
            argv_strings.push_back(arg);
        }
    }
    if (placeholders != 1) {
        throw SpawnError("runtime command must contain exactly one {file}");
    }

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe)) {
        throw IoError("pipe creation failed");
    }

    std::vector<std::string> env_strings;
    for (const char* name : kEnvAllowlist) {
        if (const char* value = std::getenv(name)) {
            env_strings.push_back(std::string(name) + "=" + value);
        }
    }

    pid_t pid = fork();
    if (pid < 0) {
        throw SpawnError("fork failed");
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                       err_pipe[0], err_pipe[1]}) {
            close(fd);
        }
        if (chdir(dir.path().c_str()) != 0) _exit(127);
        std::vector<char*> argv;
        for (auto& s : argv_strings) argv.push_back(s.data());
        argv.push_back(nullptr);
        std::vector<char*> envp;
        for (auto& s : env_strings) envp.push_back(s.data());
        envp.push_back(nullptr);
        // execvpe resolves the command via the (allowlisted) PATH.
        execvpe(argv[0], argv.data(), envp.data());
        _exit(127);
    }

    setpgid(pid, pid);
    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);

    // Feed the stdin script, then close so the program sees EOF.
    {
        std::string script;
        for (const auto& line : config.stdin_script) script += line + "\n";
        signal(SIGPIPE, SIG_IGN);
        const char* p = script.data();
        std::size_t left = script.size();
        while (left > 0) {
            ssize_t n = write(in_pipe[1], p, left);
            if (n <= 0) break;
            p += n;
            left -= static_cast<std::size_t>(n);
        }
        close(in_pipe[1]);
    }

    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    ExecutionOutcome outcome;
    bool out_truncated = false, err_truncated = false;
    auto start = std::chrono::steady_clock::now();
    auto deadline =
        start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(config.timeout_seconds));

    bool killed = false;
    bool out_open = true, err_open = true;
    char buf[4096];
    int status = 0;
    bool exited = false;

    while (true) {
        if (!killed && (std::chrono::steady_clock::now() >= deadline ||
                        g_interrupted.load())) {
            kill(-pid, SIGKILL);
            killed = true;
            outcome.timed_out = !g_interrupted.load();
        }

        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
        if (nfds > 0) {
            poll(fds, nfds, 100);
            for (nfds_t i = 0; i < nfds; ++i) {
                if (!(fds[i].revents & (POLLIN | POLLHUP))) continue;
                bool is_out = fds[i].fd == out_pipe[0];
                ssize_t n;
                while ((n = read(fds[i].fd, buf, sizeof(buf))) > 0) {
                    append_capped(is_out ? &outcome.stdout_text
                                         : &outcome.stderr_text,
                                  buf, n, config.capture_limit,
                                  is_out ? &out_truncated : &err_truncated);
                }
                if (n == 0) {
                    close(fds[i].fd);
                    (is_out ? out_open : err_open) = false;
                }
            }
        }

        if (!exited) {
            pid_t r = waitpid(pid, &status, WNOHANG);
            if (r == pid) exited = true;
        }
        if (exited && !out_open && !err_open) break;
        if (exited && killed) {
            // Streams held open by orphaned grandchildren; stop draining.
            if (out_open) close(out_pipe[0]);
            if (err_open) close(err_pipe[0]);
            break;
        }
    }

    // Sweep any straggling process-group members.
    kill(-pid, SIGKILL);

    auto end = std::chrono::steady_clock::now();
    outcome.duration_seconds =
        std::chrono::duration<double>(end - start).count();
    if (outcome.timed_out &&
        outcome.duration_seconds < config.timeout_seconds) {
        outcome.duration_seconds = config.timeout_seconds;
    }
    if (WIFEXITED(status) && !killed) {
        outcome.exit_code = WEXITSTATUS(status);
        if (outcome.exit_code == 127) {
            throw SpawnError("runtime command not executable: " +
                             argv_strings.front());
        }
    }
    return outcome;
}

void scrub_outcome(ExecutionOutcome* outcome, const std::string& dir_path) {
    auto scrub = [&](std::string* text) {
        std::size_t pos = 0;
        while ((pos = text->find(dir_path, pos)) != std::string::npos) {
            text->replace(pos, dir_path.size(), "<sandbox>");
            pos += 9;
        }
    };
    scrub(&outcome->stdout_text);
    scrub(&outcome->stderr_text);
}

}  // namespace agentmesh
