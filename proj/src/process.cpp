#include "debtlens/process.hpp"

#include "debtlens/error.hpp"

#include <cerrno>
#include <cstring>

extern "C" {
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>
}

namespace debtlens::proc {

namespace {

struct Pipe {
    int fds[2] = {-1, -1};
    Pipe() {
        if (::pipe(fds) != 0) throw Error("pipe() failed: " + std::string(std::strerror(errno)));
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (fds[0] >= 0) ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0) ::close(fds[1]);
        fds[1] = -1;
    }
};

void set_nonblocking(int fd) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

} // namespace

CommandResult run(const std::vector<std::string>& argv, const CommandOptions& opts) {
    if (argv.empty()) throw Error("run: empty argv");

    Pipe out_pipe, err_pipe, in_pipe;

    std::vector<char*> cargs;
    cargs.reserve(argv.size() + 1);
    for (const auto& a : argv) cargs.push_back(const_cast<char*>(a.c_str()));
    cargs.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0) throw Error("fork() failed: " + std::string(std::strerror(errno)));

    if (pid == 0) {
        ::dup2(in_pipe.fds[0], STDIN_FILENO);
        ::dup2(out_pipe.fds[1], STDOUT_FILENO);
        ::dup2(err_pipe.fds[1], STDERR_FILENO);
        in_pipe.close_read();
        in_pipe.close_write();
        out_pipe.close_read();
        out_pipe.close_write();
        err_pipe.close_read();
        err_pipe.close_write();
        if (opts.cwd && ::chdir(opts.cwd->c_str()) != 0) ::_exit(127);
        for (const auto& kv : opts.extra_env) {
            auto eq = kv.find('=');
            if (eq != std::string::npos)
                ::setenv(kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str(), 1);
        }
        ::execvp(cargs[0], cargs.data());
        ::_exit(127);
    }

    in_pipe.close_read();
    out_pipe.close_write();
    err_pipe.close_write();

    std::string stdin_data = opts.stdin_data.value_or("");
    std::size_t written = 0;
    if (stdin_data.empty()) in_pipe.close_write();

    set_nonblocking(out_pipe.fds[0]);
    set_nonblocking(err_pipe.fds[0]);
    if (in_pipe.fds[1] >= 0) set_nonblocking(in_pipe.fds[1]);

    CommandResult result;
    char buf[65536];
    while (true) {
        struct pollfd pfds[3];
        nfds_t n = 0;
        int out_idx = -1, err_idx = -1, in_idx = -1;
        if (out_pipe.fds[0] >= 0) {
            pfds[n] = {out_pipe.fds[0], POLLIN, 0};
            out_idx = static_cast<int>(n++);
        }
        if (err_pipe.fds[0] >= 0) {
            pfds[n] = {err_pipe.fds[0], POLLIN, 0};
            err_idx = static_cast<int>(n++);
        }
        if (in_pipe.fds[1] >= 0) {
            pfds[n] = {in_pipe.fds[1], POLLOUT, 0};
            in_idx = static_cast<int>(n++);
        }
        if (n == 0) break;
        if (::poll(pfds, n, -1) < 0) {
            if (errno == EINTR) continue;
            throw Error("poll() failed: " + std::string(std::strerror(errno)));
        }
        if (out_idx >= 0 && (pfds[out_idx].revents & (POLLIN | POLLHUP))) {
            ssize_t r = ::read(out_pipe.fds[0], buf, sizeof buf);
            if (r > 0)
                result.out.append(buf, static_cast<std::size_t>(r));
            else if (r == 0 || (r < 0 && errno != EAGAIN && errno != EINTR))
                out_pipe.close_read();
        }
        if (err_idx >= 0 && (pfds[err_idx].revents & (POLLIN | POLLHUP))) {
            ssize_t r = ::read(err_pipe.fds[0], buf, sizeof buf);
            if (r > 0)
                result.err.append(buf, static_cast<std::size_t>(r));
            else if (r == 0 || (r < 0 && errno != EAGAIN && errno != EINTR))
                err_pipe.close_read();
        }
        if (in_idx >= 0 && (pfds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (pfds[in_idx].revents & (POLLERR | POLLHUP)) {
                in_pipe.close_write();
            } else {
                ssize_t w = ::write(in_pipe.fds[1], stdin_data.data() + written,
                                    stdin_data.size() - written);
                if (w > 0) written += static_cast<std::size_t>(w);
                if (written >= stdin_data.size() || (w < 0 && errno != EAGAIN && errno != EINTR))
                    in_pipe.close_write();
            }
        }
    }

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw Error("waitpid() failed");
    }
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    return result;
}

} // namespace debtlens::proc
