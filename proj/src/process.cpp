#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>

#include "mfid/airfoil.hpp"

namespace mfid::airfoil {

namespace {

class Fd {
public:
    explicit Fd(int fd = -1) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }
    int get() const { return fd_; }
    void reset()
    {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_;
};

struct ChildOutcome {
    std::string line;
    int status = 0;
};

ChildOutcome run_child(const std::vector<std::string>& argv, const std::string& input,
                       std::chrono::milliseconds timeout)
{
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe(in_pipe) != 0)
        throw EvaluationError(std::string("pipe: ") + std::strerror(errno));
    Fd in_r(in_pipe[0]), in_w(in_pipe[1]);
    if (::pipe(out_pipe) != 0)
        throw EvaluationError(std::string("pipe: ") + std::strerror(errno));
    Fd out_r(out_pipe[0]), out_w(out_pipe[1]);

    std::vector<char*> args;
    for (const auto& a : argv)
        args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0)
        throw EvaluationError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(in_r.get(), STDIN_FILENO);
        ::dup2(out_w.get(), STDOUT_FILENO);
        ::close(in_r.get());
        ::close(in_w.get());
        ::close(out_r.get());
        ::close(out_w.get());
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    in_r.reset();
    out_w.reset();

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    auto kill_child = [&] {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, nullptr, 0);
    };

    std::size_t written = 0;
    while (written < input.size()) {
        const ssize_t n = ::write(in_w.get(), input.data() + written, input.size() - written);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            break;  // child closed its stdin; its exit status tells the rest
        }
        written += static_cast<std::size_t>(n);
    }
    in_w.reset();

    std::string buffer;
    char chunk[4096];
    while (buffer.find('\n') == std::string::npos) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            kill_child();
            throw EvaluationError("evaluator timed out");
        }
        pollfd pfd{out_r.get(), POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0 && errno == EINTR)
            continue;
        if (ready <= 0)
            continue;
        const ssize_t n = ::read(out_r.get(), chunk, sizeof chunk);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0)
            break;
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
    out_r.reset();

    ChildOutcome out;
    if (::waitpid(pid, &out.status, 0) < 0)
        throw EvaluationError(std::string("waitpid: ") + std::strerror(errno));
    out.line = buffer.substr(0, buffer.find('\n'));
    return out;
}

}  // namespace

ProcessCpSolver::ProcessCpSolver(std::vector<std::string> argv, FlowConditions flow,
                                 std::chrono::milliseconds timeout)
    : argv_(std::move(argv)), flow_(flow), timeout_(timeout)
{
    if (argv_.empty())
        throw std::invalid_argument("ProcessCpSolver: empty command");
    // a child that exits early must not take the parent down on write
    std::signal(SIGPIPE, SIG_IGN);
}

CpDistribution ProcessCpSolver::run(const std::vector<Point>& coords, Fidelity fidelity) const
{
    const ChildOutcome r = run_child(argv_, encode_request(coords, fidelity, flow_) + "\n", timeout_);
    if (!WIFEXITED(r.status) || WEXITSTATUS(r.status) != 0)
        throw EvaluationError("evaluator exited abnormally (status " + std::to_string(r.status) + ")");
    if (r.line.empty())
        throw EvaluationError("evaluator produced no response");
    return decode_response(r.line);
}

}  // namespace mfid::airfoil
