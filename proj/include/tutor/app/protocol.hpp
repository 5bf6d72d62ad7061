#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "tutor/core/types.hpp"

namespace tutor::app {

using nlohmann::json;

enum class EnvelopeKind { PhaseChanged, TurnAdded, AssessmentSet, ScenarioSet, FeedbackReady, Error, Ended };

std::string_view to_string(EnvelopeKind kind);
std::optional<EnvelopeKind> envelope_kind_from_string(std::string_view text);

// One event on a session's stream. seq is gap-free from 1 per session;
// seq 0 marks a reply addressed to a single gateway client (rejections,
// malformed frames) that is not part of any session stream.
struct SessionEventEnvelope {
    std::string session_id;
    std::int64_t seq = 0;
    EnvelopeKind kind = EnvelopeKind::Error;
    json payload = json::object();
    std::string ts;  // ISO-8601 UTC

    bool operator==(const SessionEventEnvelope&) const = default;
};

json to_json(const SessionEventEnvelope& e);
// Throws EncodingError on a malformed envelope.
SessionEventEnvelope envelope_from_json(const json& j);

json to_json(const TurnRecord& t);
json to_json(const Scenario& s);
json to_json(const AssessmentResult& a);
json to_json(const FeedbackReport& f);

Scenario scenario_from_json(const json& j);

// ---- operator commands -------------------------------------------------

struct ForceTransition { TaskPhase target; };
struct EndSessionCommand {};
struct InjectScenario { Scenario scenario; };
struct SayAsLearner { std::string text; };

using OperatorCommand = std::variant<ForceTransition, EndSessionCommand, InjectScenario, SayAsLearner>;

std::string_view command_name(const OperatorCommand& command);

// {"type": "force_transition", "phase": "Ended"}, {"type": "end_session"},
// {"type": "inject_scenario", "scenario": {...}},
// {"type": "say_as_learner", "text": "..."}. EncodingError when malformed.
OperatorCommand operator_command_from_json(const json& j);
json to_json(const OperatorCommand& command);

}  // namespace tutor::app
