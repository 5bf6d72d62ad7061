#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tutor/core/types.hpp"

namespace tutor::workflow {

struct SessionState {
    std::string session_id;
    TaskPhase phase = TaskPhase::Introduction;
    LearnerProfile profile;
    std::optional<Scenario> active_scenario;
    std::vector<TurnRecord> short_term;  // whole in-session history; windowed per request
    int phase_turn_count = 0;            // learner utterances since the last phase change
    PromptMode prompt_mode = PromptMode::Multi;
    int max_turns_per_phase = 8;

    // Index into short_term where the current phase began.
    std::size_t phase_start = 0;
    std::vector<Scenario> menu;  // last offered, empty outside ScenarioSelection
    std::optional<AssessmentResult> assessment;
    std::optional<FeedbackReport> last_feedback;
    std::vector<std::string> scenarios_practiced;
    std::int64_t assessment_speech_ms = 0;

    std::int64_t next_seq() const { return short_term.empty() ? 1 : short_term.back().seq + 1; }
    std::vector<TurnRecord> phase_history() const;

    bool operator==(const SessionState&) const = default;
};

enum class Command { EndSession, SwitchRolePlay, RequestScenarios };

std::string_view to_string(Command command);

struct LearnerUtterance {
    std::string text;
    TimePoint started_at{};
    TimePoint ended_at{};
    std::optional<EmotionLabel> emotion;
};

struct AgentUtterance {
    std::string text;
    TimePoint started_at{};
    TimePoint ended_at{};
    std::optional<std::int64_t> latency_ms;
    std::optional<EmotionLabel> emotion;
};

struct SaturationReached {};
struct ScenarioChosen { Scenario scenario; };
struct UserCommand { Command command; };
struct FeedbackDelivered { FeedbackReport report; };

using SessionEvent = std::variant<LearnerUtterance, AgentUtterance, SaturationReached, ScenarioChosen,
                                  UserCommand, FeedbackDelivered>;

// PreconditionError on an empty learner_id or session_id; ConfigError on a
// bad config.
SessionState init_session(std::string session_id, LearnerProfile profile, const SessionConfig& config);

// Pure transition function. Ended absorbs every event. Phase changes that
// are not edges of the phase graph throw ProtocolError(from, to); so does a
// learner utterance once the phase cap is reached.
SessionState apply_event(const SessionState& state, const SessionEvent& event);

}  // namespace tutor::workflow
