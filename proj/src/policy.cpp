// SPDX-License-Identifier: Apache-2.0

#include "stepo/policy.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>

#include <httplib.h>

namespace stepo {

int policy_timeout_ms(int configured_ms) {
    if (const char* env = std::getenv("STEPO_POLICY_TIMEOUT_MS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 0) return static_cast<int>(v);
    }
    if (configured_ms >= 0) return configured_ms;
    return 30000;
}

json policy_request_json(const Context& context, const ActionSpace& actions,
                         const std::string& session_id, const std::string& node_id) {
    json path = json::array();
    for (const auto& [dtype, choice] : context.path_prefix)
        path.push_back({{"type", dtype}, {"choice", choice}});
    json knowledge = json::array();
    for (const auto& item : context.knowledge.items)
        knowledge.push_back({{"source", to_string(item.source)},
                             {"ref_id", item.ref_id},
                             {"relevance", item.relevance},
                             {"payload", item.payload}});
    return json{{"session_id", session_id},
                {"node_id", node_id},
                {"node_type", actions.dtype},
                {"actions", actions.actions},
                {"context", {{"path", path},
                             {"knowledge", knowledge},
                             {"preferences", context.preferences},
                             {"anchor", context.anchor_features}}}};
}

std::map<std::string, double> parse_policy_response(const std::string& body,
                                                    const ActionSpace& actions) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw StepoError(std::string("malformed policy response: ") + e.what());
    }
    if (!j.is_object() || !j.contains("scores") || !j.at("scores").is_object())
        throw StepoError("policy response lacks a \"scores\" object");
    const json& scores = j.at("scores");
    std::map<std::string, double> out;
    double sum = 0.0;
    for (const auto& action : actions.actions) {
        if (!scores.contains(action))
            throw StepoError("policy response missing action \"" + action + "\"");
        if (!scores.at(action).is_number())
            throw StepoError("policy score for \"" + action + "\" is not a number");
        double v = scores.at(action).get<double>();
        if (v < 0.0) throw StepoError("policy score for \"" + action + "\" is negative");
        out[action] = v;
        sum += v;
    }
    if (sum <= 0.0) throw StepoError("policy response scores sum to zero");
    for (auto& [a, v] : out) v /= sum;
    return out;
}

SubprocessPolicy::SubprocessPolicy(std::string command, const KnowledgeBase& kb, int timeout_ms)
    : command_(std::move(command)), fallback_(kb), timeout_ms_(policy_timeout_ms(timeout_ms)) {}

SubprocessPolicy::~SubprocessPolicy() { shutdown(); }

bool SubprocessPolicy::ensure_started() {
    if (pid_ > 0) return true;
    if (dead_) return false;

    int to_child[2] = {-1, -1};
    int from_child[2] = {-1, -1};
    if (pipe(to_child) != 0) {
        dead_ = true;
        return false;
    }
    if (pipe(from_child) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        dead_ = true;
        return false;
    }

    pid_t pid = fork();
    if (pid < 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
        dead_ = true;
        return false;
    }
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    // A dead child must surface as a read/write error, not a process signal.
    signal(SIGPIPE, SIG_IGN);
    return true;
}

bool SubprocessPolicy::write_line(const std::string& line) {
    std::string payload = line + "\n";
    std::size_t off = 0;
    while (off < payload.size()) {
        ssize_t n = write(to_child_, payload.data() + off, payload.size() - off);
        if (n <= 0) return false;
        off += static_cast<std::size_t>(n);
    }
    return true;
}

bool SubprocessPolicy::read_line(std::string& line, int timeout_ms) {
    auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
            line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            return true;
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - std::chrono::steady_clock::now())
                             .count();
        if (remaining < 0) return false;
        pollfd pfd{from_child_, POLLIN, 0};
        int r = poll(&pfd, 1, static_cast<int>(remaining));
        if (r <= 0) return false;  // timeout or poll error
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof chunk);
        if (n <= 0) return false;  // child closed its stdout
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void SubprocessPolicy::shutdown() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        kill(static_cast<pid_t>(pid_), SIGKILL);
        int status = 0;
        waitpid(static_cast<pid_t>(pid_), &status, 0);
        pid_ = -1;
    }
    dead_ = true;
}

std::map<std::string, double> SubprocessPolicy::score(const Context& context,
                                                      const ActionSpace& actions,
                                                      const std::string& session_id,
                                                      const std::string& node_id) {
    auto fall_back = [&](const std::string& reason) {
        events_.push_back("node " + node_id + ": " + reason + "; deterministic fallback");
        shutdown();
        return fallback_.score(context, actions, session_id, node_id);
    };

    if (dead_ || !ensure_started())
        return fall_back(dead_ ? "adapter already failed" : "adapter failed to start");
    json request = policy_request_json(context, actions, session_id, node_id);
    if (!write_line(request.dump())) return fall_back("write to adapter failed");
    std::string line;
    if (!read_line(line, timeout_ms_))
        return fall_back("no response within " + std::to_string(timeout_ms_) + " ms");
    try {
        return parse_policy_response(line, actions);
    } catch (const StepoError& e) {
        return fall_back(e.what());
    }
}

HttpPolicy::HttpPolicy(std::string endpoint, const KnowledgeBase& kb, int timeout_ms)
    : fallback_(kb), timeout_ms_(policy_timeout_ms(timeout_ms)) {
    // Split "scheme://host:port/path" into client base and request path.
    auto scheme_end = endpoint.find("://");
    std::size_t path_start =
        endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = endpoint;
        path_ = "/";
    } else {
        host_ = endpoint.substr(0, path_start);
        path_ = endpoint.substr(path_start);
    }
}

std::map<std::string, double> HttpPolicy::score(const Context& context,
                                                const ActionSpace& actions,
                                                const std::string& session_id,
                                                const std::string& node_id) {
    auto fall_back = [&](const std::string& reason) {
        events_.push_back("node " + node_id + ": " + reason + "; deterministic fallback");
        return fallback_.score(context, actions, session_id, node_id);
    };

    httplib::Client client(host_);
    client.set_connection_timeout(0, timeout_ms_ * 1000L);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000L);
    client.set_write_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000L);

    json request = policy_request_json(context, actions, session_id, node_id);
    auto res = client.Post(path_, request.dump(), "application/json");
    if (!res) return fall_back("endpoint unreachable or timed out");
    if (res->status != 200)
        return fall_back("endpoint returned status " + std::to_string(res->status));
    try {
        return parse_policy_response(res->body, actions);
    } catch (const StepoError& e) {
        return fall_back(e.what());
    }
}

}  // namespace stepo
