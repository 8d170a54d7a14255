// SPDX-License-Identifier: Apache-2.0
//
// External decision policies speaking newline-delimited JSON, either over a
// child process's standard streams or via HTTP POST. Request/response shape:
//
//   -> {"session_id": s, "node_id": n, "node_type": t, "actions": [...],
//       "context": {"path": [...], "knowledge": [...], "preferences": {...},
//                   "anchor": {...}}}
//   <- {"scores": {"<action>": number, ...}, "rationale": "..."}
//
// A timeout, malformed response, negative score, or missing action triggers
// the deterministic fallback policy; every fallback is recorded as an event.
// STEPO_POLICY_TIMEOUT_MS overrides the adapter timeout.

#pragma once

#include <string>
#include <vector>

#include "stepo/reasoning.hpp"

namespace stepo {

// Effective adapter timeout: the environment override when set, otherwise
// `configured_ms` when nonnegative, otherwise 30000.
int policy_timeout_ms(int configured_ms = -1);

// Wire-protocol request body for one node decision.
json policy_request_json(const Context& context, const ActionSpace& actions,
                         const std::string& session_id, const std::string& node_id);

// Validate and normalize a wire response against the action space. Throws
// StepoError describing the violation (caller falls back).
std::map<std::string, double> parse_policy_response(const std::string& body,
                                                    const ActionSpace& actions);

// Long-running child process, one per session; requests and responses are
// single JSON lines on its stdin/stdout. The child is spawned lazily on the
// first call and killed on destruction or after any protocol failure, after
// which every call uses the fallback.
class SubprocessPolicy : public DecisionPolicy {
public:
    SubprocessPolicy(std::string command, const KnowledgeBase& kb, int timeout_ms = -1);
    ~SubprocessPolicy() override;
    SubprocessPolicy(const SubprocessPolicy&) = delete;
    SubprocessPolicy& operator=(const SubprocessPolicy&) = delete;

    std::map<std::string, double> score(const Context& context, const ActionSpace& actions,
                                        const std::string& session_id,
                                        const std::string& node_id) override;
    std::vector<std::string> fallback_events() const override { return events_; }

private:
    bool ensure_started();
    bool write_line(const std::string& line);
    bool read_line(std::string& line, int timeout_ms);
    void shutdown();

    std::string command_;
    DeterministicPolicy fallback_;
    int timeout_ms_;
    long pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool dead_ = false;
    std::vector<std::string> events_;
};

// HTTP POST to a fixed endpoint, e.g. "http://127.0.0.1:8080/score".
class HttpPolicy : public DecisionPolicy {
public:
    HttpPolicy(std::string endpoint, const KnowledgeBase& kb, int timeout_ms = -1);

    std::map<std::string, double> score(const Context& context, const ActionSpace& actions,
                                        const std::string& session_id,
                                        const std::string& node_id) override;
    std::vector<std::string> fallback_events() const override { return events_; }

private:
    std::string host_;  // scheme://host:port
    std::string path_;
    DeterministicPolicy fallback_;
    int timeout_ms_;
    std::vector<std::string> events_;
};

}  // namespace stepo
