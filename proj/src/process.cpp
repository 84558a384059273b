#include "tabcheck/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

#include "tabcheck/error.hpp"

extern char** environ;

namespace tabcheck {

namespace {

struct Pipe {
    int fd[2] = {-1, -1};

    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0) {
            throw AdapterError(std::string("pipe failed: ") + std::strerror(errno));
        }
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;

    void close_read() {
        if (fd[0] >= 0) ::close(fd[0]);
        fd[0] = -1;
    }
    void close_write() {
        if (fd[1] >= 0) ::close(fd[1]);
        fd[1] = -1;
    }
};

void ignore_sigpipe_once() {
    // Writes to a child that exited early must fail with EPIPE instead of
    // killing this process.
    static std::once_flag flag;
    std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::vector<std::string> merged_environment(
    const std::vector<std::pair<std::string, std::string>>& extra) {
    std::vector<std::string> out;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        std::string_view entry(*e);
        bool replaced = false;
        for (const auto& [k, v] : extra) {
            if (entry.size() > k.size() && entry.substr(0, k.size()) == k && entry[k.size()] == '=') {
                replaced = true;
                break;
            }
        }
        if (!replaced) out.emplace_back(entry);
    }
    for (const auto& [k, v] : extra) out.push_back(k + "=" + v);
    return out;
}

}  // namespace

ProcessResult run_process(const std::string& command, std::string_view input,
                          const std::vector<std::pair<std::string, std::string>>& env,
                          double timeout_seconds) {
    ignore_sigpipe_once();
    Pipe in_pipe;
    Pipe out_pipe;
    Pipe err_pipe;

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe.fd[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe.fd[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_pipe.fd[1], STDERR_FILENO);

    const auto env_strings = merged_environment(env);
    std::vector<char*> envp;
    for (const auto& s : env_strings) envp.push_back(const_cast<char*>(s.c_str()));
    envp.push_back(nullptr);

    std::string shell = "/bin/sh";
    std::string flag = "-c";
    std::string cmd = command;
    char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};

    pid_t pid = 0;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, envp.data());
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
        throw AdapterError(std::string("cannot start predict command: ") + std::strerror(rc));
    }
    in_pipe.close_read();
    out_pipe.close_write();
    err_pipe.close_write();
    ::fcntl(in_pipe.fd[1], F_SETFL, O_NONBLOCK);

    ProcessResult result;
    std::size_t written = 0;
    if (input.empty()) in_pipe.close_write();

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_seconds));
    char buf[65536];
    while (out_pipe.fd[0] >= 0 || err_pipe.fd[0] >= 0) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            ::kill(pid, SIGKILL);
            break;
        }
        const auto wait_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
        pollfd fds[3];
        nfds_t n = 0;
        int in_slot = -1;
        int out_slot = -1;
        int err_slot = -1;
        if (in_pipe.fd[1] >= 0) {
            fds[n] = {in_pipe.fd[1], POLLOUT, 0};
            in_slot = static_cast<int>(n++);
        }
        if (out_pipe.fd[0] >= 0) {
            fds[n] = {out_pipe.fd[0], POLLIN, 0};
            out_slot = static_cast<int>(n++);
        }
        if (err_pipe.fd[0] >= 0) {
            fds[n] = {err_pipe.fd[0], POLLIN, 0};
            err_slot = static_cast<int>(n++);
        }
        const int ready = ::poll(fds, n, static_cast<int>(std::min<long long>(wait_ms, 1000)));
        if (ready < 0) {
            if (errno == EINTR) continue;
            ::kill(pid, SIGKILL);
            break;
        }
        if (in_slot >= 0 && fds[in_slot].revents != 0) {
            const ssize_t w = ::write(in_pipe.fd[1], input.data() + written, input.size() - written);
            if (w > 0) {
                written += static_cast<std::size_t>(w);
                if (written == input.size()) in_pipe.close_write();
            } else if (w < 0 && errno != EAGAIN && errno != EINTR) {
                // Child closed its stdin; it may still answer.
                in_pipe.close_write();
            }
        }
        auto drain = [&](int slot, Pipe& p, std::string& sink) {
            if (slot < 0 || fds[slot].revents == 0) return;
            const ssize_t r = ::read(p.fd[0], buf, sizeof(buf));
            if (r > 0) {
                sink.append(buf, static_cast<std::size_t>(r));
            } else if (r == 0 || (errno != EAGAIN && errno != EINTR)) {
                p.close_read();
            }
        };
        drain(out_slot, out_pipe, result.stdout_text);
        drain(err_slot, err_pipe, result.stderr_text);
    }
    in_pipe.close_write();

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
}

}  // namespace tabcheck
