#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "tutor/app/csv.hpp"
#include "tutor/app/event_log.hpp"
#include "tutor/app/protocol.hpp"
#include "tutor/app/runtime.hpp"
#include "tutor/workflow/runner.hpp"

namespace tutor::app {

struct HostReply {
    std::string agent_text;             // empty when the step made no agent turn
    std::optional<std::string> error;   // backend failure; the session stays usable
};

// One live session: the state machine plus its two sinks, the CSV log and
// the envelope stream. Every call is serialized on the session lock, so
// console commands and learner input never interleave mid-step.
class SessionHost {
public:
    SessionHost(Runtime& runtime, std::string session_id, LearnerProfile profile,
                std::optional<SessionConfig> session_config = std::nullopt);
    ~SessionHost();

    SessionHost(const SessionHost&) = delete;
    SessionHost& operator=(const SessionHost&) = delete;

    // Opening greeting; no-op once the session has turns.
    HostReply start();

    HostReply learner_turn(const workflow::TurnInput& input);
    HostReply learner_text(const std::string& text) { return learner_turn({text}); }

    // Slash commands. ProtocolError when the current phase does not allow it.
    HostReply switch_role_play();
    HostReply request_scenarios();
    HostReply practice(const std::string& description);  // "/scenario <text>"
    HostReply choose(const Scenario& scenario);
    HostReply say_agent(const std::string& text);
    HostReply force(TaskPhase target);
    void end();

    // Operator command from the console; ProtocolError for illegal edges.
    HostReply apply(const OperatorCommand& command);

    workflow::SessionState state() const;
    bool ended() const;
    const std::string& session_id() const { return session_id_; }
    EventLog& events() { return events_; }
    const CsvLog& csv() const { return csv_; }
    std::filesystem::path csv_path() const { return csv_.path(); }

private:
    template <class Fn>
    HostReply step(Fn&& fn);
    void publish(const workflow::StepResult& result);
    void finish_locked();
    void check_time_limit_locked();

    Runtime& runtime_;
    std::string session_id_;
    SessionConfig config_;
    workflow::Deps deps_;
    mutable std::recursive_mutex mutex_;
    workflow::SessionState state_;
    EventLog events_;
    CsvLog csv_;
    TimePoint started_at_;
    bool finished_ = false;
};

}  // namespace tutor::app
