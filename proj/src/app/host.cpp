#include "tutor/app/host.hpp"

#include <spdlog/spdlog.h>

#include <fstream>

#include "tutor/memory/summarize.hpp"

namespace tutor::app {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

LearnerProfile with_recalled_level(Runtime& rt, LearnerProfile profile) {
    if (profile.assessed_level || !rt.memory) return profile;
    for (const auto& s : rt.memory->list_by_learner(profile.learner_id)) {
        if (s.assessed_level) {
            profile.assessed_level = s.assessed_level;
            break;
        }
    }
    return profile;
}

}  // namespace

SessionHost::SessionHost(Runtime& runtime, std::string session_id, LearnerProfile profile,
                         std::optional<SessionConfig> session_config)
    : runtime_(runtime),
      session_id_(session_id),
      config_(session_config.value_or(runtime.config.session)),
      deps_(runtime.deps_for(profile)),
      state_(workflow::init_session(session_id, with_recalled_level(runtime, std::move(profile)), config_)),
      events_(session_id, *runtime.clock),
      csv_(session_id, std::filesystem::path(config_.log_dir) / (session_id + ".csv")),
      started_at_(runtime.clock->now()) {
    deps_.token_window_budget = config_.token_window_budget;
}

SessionHost::~SessionHost() {
    try {
        end();
    } catch (const std::exception& e) {
        spdlog::error("closing session {}: {}", session_id_, e.what());
    }
}

void SessionHost::publish(const workflow::StepResult& result) {
    // `ended` closes the stream, so it waits for the marker turn.
    bool ended = false;
    for (const auto& note : result.notes) {
        std::visit(overloaded{
                       [&](const workflow::TurnAdded& n) {
                           csv_.append(n.turn);
                           events_.emit(EnvelopeKind::TurnAdded, to_json(n.turn));
                       },
                       [&](const workflow::PhaseChanged& n) {
                           events_.emit(EnvelopeKind::PhaseChanged,
                                        {{"from", to_string(n.from)}, {"to", to_string(n.to)}});
                           ended = ended || n.to == TaskPhase::Ended;
                       },
                       [&](const workflow::AssessmentSet& n) {
                           events_.emit(EnvelopeKind::AssessmentSet, to_json(n.result));
                       },
                       [&](const workflow::ScenarioSet& n) {
                           events_.emit(EnvelopeKind::ScenarioSet, to_json(n.scenario));
                       },
                       [&](const workflow::FeedbackReady& n) {
                           events_.emit(EnvelopeKind::FeedbackReady, to_json(n.report));
                       },
                   },
                   note);
    }
    if (ended) events_.emit(EnvelopeKind::Ended, {{"turns", result.state.short_term.size()}});
    state_ = result.state;
}

template <class Fn>
HostReply SessionHost::step(Fn&& fn) {
    std::lock_guard lock(mutex_);
    if (state_.phase == TaskPhase::Ended) throw PreconditionError("session " + session_id_ + " has ended");
    HostReply reply;
    try {
        auto result = fn();
        publish(result);
        reply.agent_text = result.agent_output;
    } catch (const workflow::TurnFailed& e) {
        publish(e.partial());
        events_.emit(EnvelopeKind::Error, {{"message", e.what()}, {"phase", to_string(state_.phase)}});
        reply.error = e.what();
    }
    if (state_.phase == TaskPhase::Ended) finish_locked();
    return reply;
}

HostReply SessionHost::start() {
    std::lock_guard lock(mutex_);
    if (!state_.short_term.empty() || state_.phase == TaskPhase::Ended) return {};
    return step([&] { return workflow::open_session(state_, deps_); });
}

HostReply SessionHost::learner_turn(const workflow::TurnInput& input) {
    std::lock_guard lock(mutex_);
    // A failure on the capping turn left the transition undone; finish it first.
    std::string preface;
    if (workflow::cap_pending(state_)) {
        auto pending = step([&] { return workflow::resolve_cap(state_, deps_); });
        if (pending.error || state_.phase == TaskPhase::Ended) return pending;
        preface = pending.agent_text;
    }
    auto reply = step([&] { return workflow::run_turn(state_, input, deps_); });
    if (!preface.empty()) reply.agent_text = reply.agent_text.empty() ? preface : preface + "\n\n" + reply.agent_text;
    check_time_limit_locked();
    return reply;
}

HostReply SessionHost::switch_role_play() {
    return step([&] { return workflow::switch_role_play(state_, deps_); });
}

HostReply SessionHost::request_scenarios() {
    return step([&] { return workflow::request_scenarios(state_, deps_); });
}

HostReply SessionHost::practice(const std::string& description) {
    std::lock_guard lock(mutex_);
    auto level = state_.assessment ? state_.assessment->level : state_.profile.assessed_level.value_or(CefrLevel::B1);
    auto scenario = pedagogy::user_specified_scenario("I want to practice " + description, level);
    if (!scenario) throw PreconditionError("/scenario needs a description");
    return choose(*scenario);
}

HostReply SessionHost::choose(const Scenario& scenario) {
    return step([&] { return workflow::choose_scenario(state_, scenario, deps_); });
}

HostReply SessionHost::say_agent(const std::string& text) {
    return step([&] { return workflow::say_agent(state_, text, deps_); });
}

HostReply SessionHost::force(TaskPhase target) {
    std::lock_guard lock(mutex_);
    if (target == TaskPhase::Ended) {
        end();
        return {};
    }
    return step([&] { return workflow::force_transition(state_, target, deps_); });
}

void SessionHost::end() {
    std::lock_guard lock(mutex_);
    if (state_.phase != TaskPhase::Ended) publish(workflow::end_session(state_, runtime_.clock->now()));
    finish_locked();
}

HostReply SessionHost::apply(const OperatorCommand& command) {
    return std::visit(overloaded{
                          [&](const ForceTransition& c) { return force(c.target); },
                          [&](const EndSessionCommand&) {
                              end();
                              return HostReply{};
                          },
                          [&](const InjectScenario& c) { return choose(c.scenario); },
                          [&](const SayAsLearner& c) { return learner_text(c.text); },
                      },
                      command);
}

workflow::SessionState SessionHost::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

bool SessionHost::ended() const {
    std::lock_guard lock(mutex_);
    return state_.phase == TaskPhase::Ended;
}

void SessionHost::check_time_limit_locked() {
    if (config_.session_time_limit_s <= 0 || state_.phase == TaskPhase::Ended) return;
    auto elapsed_ms = millis_between(started_at_, runtime_.clock->now());
    if (static_cast<double>(elapsed_ms) >= config_.session_time_limit_s * 1000.0) {
        spdlog::info("session {} reached its time limit", session_id_);
        end();
    }
}

void SessionHost::finish_locked() {
    if (finished_) return;
    finished_ = true;
    csv_.close();
    if (csv_.error()) spdlog::error("transcript log: {}", *csv_.error());

    nlohmann::json meta = {{"session_id", session_id_},
                           {"learner_id", state_.profile.learner_id},
                           {"prompt_mode", to_string(config_.prompt_mode)},
                           {"voice_id", config_.voice_id},
                           {"turns", state_.short_term.size()},
                           {"assessed_level", nullptr},
                           {"scenarios_practiced", state_.scenarios_practiced}};
    if (state_.profile.assessed_level) meta["assessed_level"] = to_string(*state_.profile.assessed_level);
    std::ofstream(std::filesystem::path(config_.log_dir) / (session_id_ + ".meta.json")) << meta.dump(2) << "\n";

    if (!runtime_.memory || state_.short_term.empty()) return;
    try {
        memory::SessionFacts facts{session_id_, state_.profile.assessed_level, state_.scenarios_practiced,
                                   runtime_.clock->now()};
        auto summary = memory::summarize_session(
            state_.short_term, state_.profile, facts, *runtime_.backend,
            runtime_.lib.get(prompt::TemplateId::Persona).messages.front().content,
            runtime_.lib.directive("summarize"));
        runtime_.memory->put(summary);
    } catch (const Error& e) {
        spdlog::warn("session summary not stored: {}", e.what());
    }
}

}  // namespace tutor::app
