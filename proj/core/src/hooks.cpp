#include "mforge/hooks.hpp"

#include "mforge/diagnostic.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <regex>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace mforge::hooks {

using nlohmann::json;

namespace {

[[noreturn]] void hook_fail(const std::string& subject, const std::string& message) {
    throw Failure(codes::kHookFailure, subject, message);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

std::string describe_status(int status) {
    if (WIFEXITED(status)) return "exit status " + std::to_string(WEXITSTATUS(status));
    if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
    return "abnormal termination";
}

} // namespace

std::string encode_request(const sim::ClassifyQuery& q) {
    json j = json::object();
    j["t"] = q.t;
    j["j"] = q.j;
    j["s"] = q.s;
    j["N"] = q.N;
    j["h"] = q.h;
    return j.dump();
}

sim::ClassifyQuery decode_request(std::string_view line) {
    json j;
    try {
        j = json::parse(trim(line));
    } catch (const json::exception& e) {
        throw Failure(codes::kParse, "request", e.what());
    }
    const auto ok = j.is_object() && j.size() == 5 && j.contains("t") && j["t"].is_number_integer() &&
                    j.contains("j") && j["j"].is_number_integer() && j.contains("s") && j["s"].is_number() &&
                    j.contains("N") && j["N"].is_number() && j.contains("h") && j["h"].is_number();
    if (!ok) throw Failure(codes::kParse, "request", "expected {\"t\", \"j\", \"s\", \"N\", \"h\"}");
    return {j["t"].get<std::int64_t>(), j["j"].get<std::int64_t>(), j["s"].get<double>(), j["N"].get<double>(),
            j["h"].get<double>()};
}

std::string encode_reply(sim::Decision d) {
    return json{{"decision", d == sim::Decision::Wanted ? "wanted" : "other"}}.dump();
}

sim::Decision decode_reply(std::string_view line) {
    json j;
    try {
        j = json::parse(trim(line));
    } catch (const json::exception&) {
        hook_fail("reply", "malformed reply '" + std::string(trim(line)) + "'");
    }
    if (!j.is_object() || j.size() != 1 || !j.contains("decision") || !j["decision"].is_string())
        hook_fail("reply", "reply must be {\"decision\": \"wanted\"|\"other\"}");
    const auto d = j["decision"].get<std::string>();
    if (d == "wanted") return sim::Decision::Wanted;
    if (d == "other") return sim::Decision::Other;
    hook_fail("reply", "unknown decision '" + d + "'");
}

// ---------------------------------------------------------------------------
// Exec

struct ExecClassifier::Impl {
    std::string command;
    pid_t pid = -1;
    int to_child = -1;
    int from_child = -1;
    std::string buffer;
    bool reaped = false;
    int status = 0;

    explicit Impl(std::string cmd) : command(std::move(cmd)) {
        int in_pipe[2];
        int out_pipe[2];
        if (::pipe2(in_pipe, O_CLOEXEC) != 0) hook_fail(command, std::strerror(errno));
        if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            hook_fail(command, std::strerror(errno));
        }

        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

        const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
        const int rc =
            ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        if (rc != 0) {
            ::close(in_pipe[1]);
            ::close(out_pipe[0]);
            hook_fail(command, std::string("cannot spawn: ") + std::strerror(rc));
        }
        to_child = in_pipe[1];
        from_child = out_pipe[0];
    }

    ~Impl() {
        close_input();
        if (from_child >= 0) ::close(from_child);
        if (!reaped && pid > 0) {
            if (!wait_for_exit(std::chrono::milliseconds(200))) {
                ::kill(pid, SIGKILL);
                ::waitpid(pid, &status, 0);
            }
        }
    }

    void close_input() {
        if (to_child >= 0) {
            ::close(to_child);
            to_child = -1;
        }
    }

    bool wait_for_exit(std::chrono::milliseconds budget) {
        const auto deadline = std::chrono::steady_clock::now() + budget;
        while (true) {
            const pid_t r = ::waitpid(pid, &status, WNOHANG);
            if (r == pid || (r < 0 && errno == ECHILD)) {
                reaped = true;
                return true;
            }
            if (std::chrono::steady_clock::now() >= deadline) return false;
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
    }

    [[noreturn]] void fail_with_status(const std::string& what) {
        close_input();
        if (wait_for_exit(std::chrono::milliseconds(200))) hook_fail(command, what + " (" + describe_status(status) + ")");
        hook_fail(command, what);
    }

    // Writes with SIGPIPE blocked so a dead hook surfaces as EPIPE.
    void write_all(std::string_view data) {
        sigset_t pipe_set;
        sigset_t old;
        sigemptyset(&pipe_set);
        sigaddset(&pipe_set, SIGPIPE);
        pthread_sigmask(SIG_BLOCK, &pipe_set, &old);
        bool broken = false;
        while (!data.empty()) {
            const ssize_t n = ::write(to_child, data.data(), data.size());
            if (n < 0 && errno == EINTR) continue;
            if (n < 0) {
                broken = true;
                break;
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
        if (broken) {
            const timespec zero{0, 0};
            sigtimedwait(&pipe_set, nullptr, &zero);
        }
        pthread_sigmask(SIG_SETMASK, &old, nullptr);
        if (broken) fail_with_status("hook stopped reading its input");
    }

    std::string read_line() {
        const auto deadline = std::chrono::steady_clock::now() + kRequestTimeout;
        while (true) {
            if (auto nl = buffer.find('\n'); nl != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                return line;
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) hook_fail(command, "no reply within timeout");
            pollfd pfd{from_child, POLLIN, 0};
            const int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
            if (pr < 0 && errno == EINTR) continue;
            if (pr < 0) hook_fail(command, std::strerror(errno));
            if (pr == 0) hook_fail(command, "no reply within timeout");
            char chunk[4096];
            const ssize_t n = ::read(from_child, chunk, sizeof chunk);
            if (n < 0 && errno == EINTR) continue;
            if (n < 0) hook_fail(command, std::strerror(errno));
            if (n == 0) fail_with_status("hook closed its output");
            buffer.append(chunk, static_cast<std::size_t>(n));
        }
    }
};

ExecClassifier::ExecClassifier(const std::string& command) : impl_(std::make_unique<Impl>(command)) {}
ExecClassifier::~ExecClassifier() = default;

sim::Decision ExecClassifier::operator()(const sim::ClassifyQuery& q) {
    if (impl_->to_child < 0) hook_fail(impl_->command, "hook already finished");
    impl_->write_all(encode_request(q) + "\n");
    const auto line = impl_->read_line();
    try {
        return decode_reply(line);
    } catch (const Failure& f) {
        hook_fail(impl_->command, f.message());
    }
}

void ExecClassifier::finish() {
    impl_->close_input();
    if (impl_->reaped) return;
    if (!impl_->wait_for_exit(kRequestTimeout)) hook_fail(impl_->command, "hook did not exit after end of input");
    if (!WIFEXITED(impl_->status) || WEXITSTATUS(impl_->status) != 0)
        hook_fail(impl_->command, "hook ended with " + describe_status(impl_->status));
}

// ---------------------------------------------------------------------------
// Http

struct HttpClassifier::Impl {
    std::string url;
    std::string path;
    std::unique_ptr<httplib::Client> client;

    explicit Impl(std::string u) : url(std::move(u)) {
        static const std::regex pattern(R"(^http://([^/:?#]+)(?::(\d+))?(/[^#]*)?$)");
        std::smatch m;
        if (!std::regex_match(url, m, pattern)) hook_fail(url, "only plain http://host[:port]/path URLs are supported");
        const std::string host = m[1].str();
        const int port = m[2].matched ? std::stoi(m[2].str()) : 80;
        path = m[3].matched ? m[3].str() : "/";
        client = std::make_unique<httplib::Client>(host, port);
        const auto secs = static_cast<time_t>(kRequestTimeout.count());
        client->set_connection_timeout(secs, 0);
        client->set_read_timeout(secs, 0);
        client->set_write_timeout(secs, 0);
    }
};

HttpClassifier::HttpClassifier(const std::string& url) : impl_(std::make_unique<Impl>(url)) {}
HttpClassifier::~HttpClassifier() = default;

sim::Decision HttpClassifier::operator()(const sim::ClassifyQuery& q) {
    auto res = impl_->client->Post(impl_->path, encode_request(q), "application/json");
    if (!res) hook_fail(impl_->url, "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) hook_fail(impl_->url, "HTTP status " + std::to_string(res->status));
    try {
        return decode_reply(res->body);
    } catch (const Failure& f) {
        hook_fail(impl_->url, f.message());
    }
}

} // namespace mforge::hooks
