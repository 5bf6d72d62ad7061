#include "tutor/app/protocol.hpp"

#include <array>

#include "tutor/core/clock.hpp"
#include "tutor/core/errors.hpp"

namespace tutor::app {

namespace {

constexpr std::array<std::pair<EnvelopeKind, std::string_view>, 7> kKindNames = {{
    {EnvelopeKind::PhaseChanged, "phase_changed"},
    {EnvelopeKind::TurnAdded, "turn_added"},
    {EnvelopeKind::AssessmentSet, "assessment_set"},
    {EnvelopeKind::ScenarioSet, "scenario_set"},
    {EnvelopeKind::FeedbackReady, "feedback_ready"},
    {EnvelopeKind::Error, "error"},
    {EnvelopeKind::Ended, "ended"},
}};

std::string req_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw EncodingError(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(EnvelopeKind kind) {
    for (auto [k, n] : kKindNames) {
        if (k == kind) return n;
    }
    return "error";
}

std::optional<EnvelopeKind> envelope_kind_from_string(std::string_view text) {
    for (auto [k, n] : kKindNames) {
        if (n == text) return k;
    }
    return std::nullopt;
}

json to_json(const SessionEventEnvelope& e) {
    return {{"session_id", e.session_id}, {"seq", e.seq}, {"kind", to_string(e.kind)},
            {"payload", e.payload},       {"ts", e.ts}};
}

SessionEventEnvelope envelope_from_json(const json& j) {
    if (!j.is_object()) throw EncodingError("envelope must be an object");
    SessionEventEnvelope e;
    e.session_id = req_string(j, "session_id");
    auto seq = j.find("seq");
    if (seq == j.end() || !seq->is_number_integer()) throw EncodingError("envelope seq must be an integer");
    e.seq = seq->get<std::int64_t>();
    auto kind = envelope_kind_from_string(req_string(j, "kind"));
    if (!kind) throw EncodingError("unknown envelope kind");
    e.kind = *kind;
    e.payload = j.value("payload", json::object());
    e.ts = req_string(j, "ts");
    return e;
}

json to_json(const TurnRecord& t) {
    json j = {{"seq", t.seq},
              {"role", to_string(t.role)},
              {"text", t.text},
              {"phase", to_string(t.phase)},
              {"started_at", format_iso8601(t.started_at)},
              {"ended_at", format_iso8601(t.ended_at)},
              {"latency_ms", nullptr},
              {"emotion", nullptr}};
    if (t.response_latency_ms) j["latency_ms"] = *t.response_latency_ms;
    if (t.emotion) j["emotion"] = to_string(*t.emotion);
    return j;
}

json to_json(const Scenario& s) {
    return {{"scenario_id", s.scenario_id},
            {"title", s.title},
            {"scene_description", s.scene_description},
            {"agent_role", s.agent_role},
            {"learner_role", s.learner_role},
            {"environment", s.environment.label()},
            {"difficulty", to_string(s.difficulty)}};
}

json to_json(const AssessmentResult& a) {
    return {{"level", to_string(a.level)},
            {"rationale", a.rationale},
            {"input_word_count", a.input_word_count},
            {"sufficient", a.sufficient}};
}

json to_json(const FeedbackReport& f) {
    json items = json::array();
    for (const auto& i : f.language_summary) items.push_back({{"item", i.item}, {"kind", to_string(i.kind)}});
    return {{"general_feedback",
             {{"strength", f.general_feedback.strength}, {"improvement", f.general_feedback.improvement}}},
            {"advice_moving_forward", f.advice_moving_forward},
            {"language_summary", items},
            {"incomplete", f.incomplete}};
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw EncodingError("scenario must be an object");
    Scenario s;
    s.title = req_string(j, "title");
    s.scene_description = req_string(j, "scene_description");
    s.agent_role = req_string(j, "agent_role");
    s.learner_role = req_string(j, "learner_role");
    if (s.scene_description.empty()) throw EncodingError("scenario scene_description must not be empty");
    if (s.agent_role == s.learner_role) throw EncodingError("scenario roles must differ");
    s.scenario_id = j.value("scenario_id", std::string("injected"));
    auto env = j.value("environment", std::string());
    if (auto kind = environment_from_string(env); kind && *kind != EnvironmentKind::Custom) {
        s.environment = {*kind, ""};
    } else {
        s.environment = {EnvironmentKind::Custom, env.empty() ? s.title : env};
    }
    if (auto d = j.find("difficulty"); d != j.end()) {
        if (!d->is_string()) throw EncodingError("scenario difficulty must be a string");
        auto level = cefr_from_string(d->get<std::string>());
        if (!level) throw EncodingError("unknown CEFR level");
        s.difficulty = *level;
    }
    return s;
}

std::string_view command_name(const OperatorCommand& command) {
    switch (command.index()) {
        case 0: return "force_transition";
        case 1: return "end_session";
        case 2: return "inject_scenario";
        default: return "say_as_learner";
    }
}

OperatorCommand operator_command_from_json(const json& j) {
    if (!j.is_object()) throw EncodingError("command must be an object");
    auto type = req_string(j, "type");
    if (type == "force_transition") {
        auto phase = phase_from_string(req_string(j, "phase"));
        if (!phase) throw EncodingError("unknown phase");
        return ForceTransition{*phase};
    }
    if (type == "end_session") return EndSessionCommand{};
    if (type == "inject_scenario") {
        auto it = j.find("scenario");
        if (it == j.end()) throw EncodingError("inject_scenario needs a scenario");
        return InjectScenario{scenario_from_json(*it)};
    }
    if (type == "say_as_learner") {
        auto text = req_string(j, "text");
        if (text.empty()) throw EncodingError("say_as_learner text must not be empty");
        return SayAsLearner{text};
    }
    throw EncodingError("unknown command type '" + type + "'");
}

json to_json(const OperatorCommand& command) {
    json j = {{"type", command_name(command)}};
    if (auto* f = std::get_if<ForceTransition>(&command)) j["phase"] = to_string(f->target);
    if (auto* s = std::get_if<InjectScenario>(&command)) j["scenario"] = to_json(s->scenario);
    if (auto* t = std::get_if<SayAsLearner>(&command)) j["text"] = t->text;
    return j;
}

}  // namespace tutor::app
