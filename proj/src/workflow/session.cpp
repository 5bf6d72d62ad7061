#include "tutor/workflow/session.hpp"

#include "tutor/core/errors.hpp"
#include "tutor/core/transitions.hpp"

namespace tutor::workflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void enter(SessionState& s, TaskPhase to) {
    if (!validate_transition(s.phase, to)) {
        throw ProtocolError(s.phase, to, "not an edge of the phase graph");
    }
    s.phase = to;
    s.phase_turn_count = 0;
    s.phase_start = s.short_term.size();
    if (to != TaskPhase::RolePlay && to != TaskPhase::Feedback) s.active_scenario.reset();
    if (to != TaskPhase::ScenarioSelection) s.menu.clear();
}

}  // namespace

std::vector<TurnRecord> SessionState::phase_history() const {
    auto start = std::min(phase_start, short_term.size());
    return {short_term.begin() + static_cast<std::ptrdiff_t>(start), short_term.end()};
}

std::string_view to_string(Command command) {
    switch (command) {
        case Command::EndSession: return "end_session";
        case Command::SwitchRolePlay: return "switch_role_play";
        case Command::RequestScenarios: return "request_scenarios";
    }
    return "unknown";
}

SessionState init_session(std::string session_id, LearnerProfile profile, const SessionConfig& config) {
    validate(config);
    if (session_id.empty()) throw PreconditionError("session_id must not be empty");
    if (profile.learner_id.empty()) throw PreconditionError("learner_id must not be empty");
    SessionState s;
    s.session_id = std::move(session_id);
    s.profile = std::move(profile);
    s.prompt_mode = config.prompt_mode;
    s.max_turns_per_phase = config.max_turns_per_phase;
    return s;
}

SessionState apply_event(const SessionState& state, const SessionEvent& event) {
    if (state.phase == TaskPhase::Ended) return state;
    SessionState s = state;

    std::visit(overloaded{
                   [&](const LearnerUtterance& e) {
                       if (e.text.empty()) throw PreconditionError("learner turn text is empty");
                       if (s.prompt_mode == PromptMode::Multi && s.phase_turn_count >= s.max_turns_per_phase) {
                           throw ProtocolError(s.phase, s.phase, "phase turn cap reached");
                       }
                       s.short_term.push_back({s.next_seq(), Role::Learner, e.text, s.phase, e.started_at,
                                               std::max(e.started_at, e.ended_at), std::nullopt, e.emotion});
                       if (s.prompt_mode == PromptMode::Multi) ++s.phase_turn_count;
                   },
                   [&](const AgentUtterance& e) {
                       if (e.text.empty()) throw PreconditionError("agent turn text is empty");
                       s.short_term.push_back({s.next_seq(), Role::Agent, e.text, s.phase, e.started_at,
                                               std::max(e.started_at, e.ended_at), e.latency_ms, e.emotion});
                   },
                   [&](const SaturationReached&) {
                       auto next = forward_phase(s.phase);
                       if (!next) throw ProtocolError(s.phase, s.phase, "phase has no forward transition");
                       enter(s, *next);
                   },
                   [&](const ScenarioChosen& e) {
                       enter(s, TaskPhase::RolePlay);
                       s.active_scenario = e.scenario;
                       s.scenarios_practiced.push_back(e.scenario.title);
                   },
                   [&](const FeedbackDelivered& e) {
                       if (s.phase != TaskPhase::Feedback) {
                           throw ProtocolError(s.phase, TaskPhase::ScenarioSelection,
                                               "feedback can only be delivered in the Feedback phase");
                       }
                       s.last_feedback = e.report;
                       enter(s, TaskPhase::ScenarioSelection);
                   },
                   [&](const UserCommand& e) {
                       switch (e.command) {
                           case Command::EndSession: enter(s, TaskPhase::Ended); break;
                           case Command::SwitchRolePlay:
                               if (s.phase != TaskPhase::RolePlay) {
                                   throw ProtocolError(s.phase, TaskPhase::ScenarioSelection,
                                                       "switching needs a running role-play");
                               }
                               enter(s, TaskPhase::ScenarioSelection);
                               break;
                           case Command::RequestScenarios:
                               if (s.phase != TaskPhase::ScenarioSelection) {
                                   throw ProtocolError(s.phase, TaskPhase::ScenarioSelection,
                                                       "scenarios are offered in ScenarioSelection");
                               }
                               s.menu.clear();
                               break;
                       }
                   },
               },
               event);
    return s;
}

}  // namespace tutor::workflow
