#include "tutor/workflow/runner.hpp"

#include <spdlog/spdlog.h>

#include "tutor/core/transitions.hpp"
#include "tutor/core/text.hpp"
#include "tutor/prompt/engine.hpp"

namespace tutor::workflow {

namespace {

// Accumulates one step: applies events, records notes, wraps backend calls.
class Stepper {
public:
    Stepper(const SessionState& s, Deps& deps) : result_{s, "", {}}, deps_(deps) {}

    SessionState& state() { return result_.state; }

    void apply(const SessionEvent& event) {
        auto& s = result_.state;
        auto phase = s.phase;
        auto size = s.short_term.size();
        s = apply_event(s, event);
        if (s.short_term.size() > size) result_.notes.push_back(TurnAdded{s.short_term.back()});
        if (auto* f = std::get_if<FeedbackDelivered>(&event)) result_.notes.push_back(FeedbackReady{f->report});
        if (s.phase != phase) result_.notes.push_back(PhaseChanged{phase, s.phase});
        if (auto* c = std::get_if<ScenarioChosen>(&event)) result_.notes.push_back(ScenarioSet{c->scenario});
    }

    void set_assessment(const AssessmentResult& r) {
        auto& s = result_.state;
        s.assessment = r;
        // Provisional levels never reach the profile.
        if (r.sufficient) s.profile.assessed_level = r.level;
        result_.notes.push_back(AssessmentSet{r});
    }

    std::optional<EmotionLabel> detect(std::string_view text) const {
        if (!deps_.lexicon) return std::nullopt;
        return embodiment::detect_emotion(text, *deps_.lexicon);
    }

    void learner(const TurnInput& in) {
        auto start = in.started_at ? *in.started_at : deps_.clock.now();
        auto end = in.ended_at ? *in.ended_at : deps_.clock.now();
        learner_end_ = end;
        learner_emotion_ = detect(in.text);
        apply(LearnerUtterance{in.text, start, end, learner_emotion_});
    }

    void mark_reply_start() { reply_start_ = deps_.clock.now(); }

    void agent(const std::string& text) {
        auto start = reply_start_ ? *reply_start_ : deps_.clock.now();
        auto end = deps_.clock.now();
        std::optional<std::int64_t> latency;
        if (learner_end_) latency = std::max<std::int64_t>(0, millis_between(*learner_end_, end));
        auto emotion = learner_emotion_;
        if (!emotion && deps_.lexicon) emotion = EmotionLabel::Neutral;
        apply(AgentUtterance{text, start, end, latency, emotion});
        result_.agent_output = text;
    }

    // Runs `fn`; any backend error becomes TurnFailed with the partial step.
    template <class Fn>
    auto guarded(Fn&& fn) -> decltype(fn()) {
        try {
            return fn();
        } catch (const BackendUnavailable& e) {
            throw TurnFailed(e.what(), result_);
        } catch (const BackendProtocolError& e) {
            throw TurnFailed(e.what(), result_);
        }
    }

    std::string complete(const std::vector<ChatMessage>& messages) {
        return guarded([&] {
            return text::trim(deps_.backend.complete(messages, {llm::kConversationTemperature}).text);
        });
    }

    StepResult finish() { return std::move(result_); }
    Deps& deps() { return deps_; }

private:
    StepResult result_;
    Deps& deps_;
    std::optional<TimePoint> learner_end_;
    std::optional<EmotionLabel> learner_emotion_;
    std::optional<TimePoint> reply_start_;
};

std::vector<TurnRecord> turns_in(const SessionState& s, TaskPhase phase) {
    std::vector<TurnRecord> out;
    for (const auto& t : s.short_term) {
        if (t.phase == phase) out.push_back(t);
    }
    return out;
}

// The most recent contiguous block of role-play turns.
std::vector<TurnRecord> role_play_history(const SessionState& s) {
    if (s.phase == TaskPhase::RolePlay) return s.phase_history();
    std::size_t end = std::min(s.phase_start, s.short_term.size());
    std::size_t begin = end;
    while (begin > 0 && s.short_term[begin - 1].phase == TaskPhase::RolePlay) --begin;
    return {s.short_term.begin() + static_cast<std::ptrdiff_t>(begin),
            s.short_term.begin() + static_cast<std::ptrdiff_t>(end)};
}

std::optional<ChatMessage> profile_note(const LearnerProfile& p) {
    std::string note;
    auto add = [&](std::string_view label, const std::optional<std::string>& v) {
        if (v && !v->empty()) note += (note.empty() ? "" : "; ") + std::string(label) + ": " + *v;
    };
    add("name", p.name);
    add("native language", p.native_language);
    add("cultural background", p.cultural_background);
    add("reason for learning English", p.motivation);
    if (p.assessed_level) add("CEFR level from an earlier session", std::string(to_string(*p.assessed_level)));
    if (note.empty()) return std::nullopt;
    return ChatMessage{ChatRole::System, "What you already know about the user: " + note + "."};
}

std::optional<CefrLevel> known_level(const SessionState& s) {
    if (s.assessment) return s.assessment->level;
    return s.profile.assessed_level;
}

std::string role_play_assessment(const SessionState& s, const pedagogy::PedagogyData& data) {
    if (s.assessment) return pedagogy::assessment_slot(*s.assessment, data);
    if (s.profile.assessed_level) return pedagogy::assessment_slot({*s.profile.assessed_level, "", 0, true}, data);
    return pedagogy::assessment_slot({CefrLevel::B1, "", 0, false}, data);
}

std::vector<ChatMessage> task_messages(const SessionState& s, TaskPhase phase, Deps& deps,
                                       const std::string& extra_directive) {
    std::vector<ChatMessage> task;
    switch (phase) {
        case TaskPhase::Introduction:
            task = prompt::render(deps.lib, prompt::TemplateId::Introduction, {});
            if (auto note = profile_note(s.profile)) task.push_back(*note);
            break;
        case TaskPhase::Assessment: {
            auto intro = turns_in(s, TaskPhase::Introduction);
            task = prompt::render(deps.lib, prompt::TemplateId::Assessment,
                                  {{"user_info_conversation", prompt::format_transcript(intro)}});
            auto topic = pedagogy::assessment_topic(s.profile, deps.data.topics);
            if (topic != deps.data.topics.default_topic) {
                task.push_back({ChatRole::System, "For the speaking task, ask the user to " + topic +
                                                      " instead of a memorable experience."});
            }
            break;
        }
        case TaskPhase::RolePlay: {
            if (!s.active_scenario) throw PreconditionError("role-play without an active scenario");
            task = prompt::render(deps.lib, prompt::TemplateId::RolePlay,
                                  {{"scenario", pedagogy::describe_scenario(*s.active_scenario)},
                                   {"assessment", role_play_assessment(s, deps.data)}});
            break;
        }
        default:
            throw PreconditionError("no conversation template for phase " + std::string(to_string(phase)));
    }
    if (!extra_directive.empty()) task.push_back({ChatRole::System, extra_directive});
    return task;
}

ChatMessage persona(const Deps& deps) { return deps.lib.get(prompt::TemplateId::Persona).messages.front(); }

// Reply generated from the template of the phase the session is in now.
std::string converse(Stepper& st, const std::string& extra_directive = "") {
    auto& s = st.state();
    auto& deps = st.deps();
    std::vector<ChatMessage> messages;
    if (s.prompt_mode == PromptMode::Single) {
        auto single = prompt::render_single_prompt(deps.lib);
        if (auto note = profile_note(s.profile)) single.push_back(*note);
        messages = prompt::compose_request(single.front(), std::span(single).subspan(1), s.short_term,
                                           deps.memory_summary, deps.token_window_budget);
    } else {
        auto task = task_messages(s, s.phase, deps, extra_directive);
        auto history = s.phase_history();
        messages = prompt::compose_request(persona(deps), task, history, deps.memory_summary,
                                           deps.token_window_budget);
    }
    return st.complete(messages);
}

std::string offer_menu(Stepper& st) {
    auto& s = st.state();
    auto& deps = st.deps();
    s.menu = pedagogy::scenario_menu(s.profile, known_level(s), deps.data, deps.lib, deps.backend);
    return pedagogy::format_menu(s.menu);
}

std::string join(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + "\n\n" + b;
}

// Feedback over the last role-play plus a new menu, spoken while still in
// Feedback; then back to ScenarioSelection.
void deliver_feedback(Stepper& st) {
    if (st.state().phase == TaskPhase::RolePlay) st.apply(SaturationReached{});
    auto history = role_play_history(st.state());
    auto report = st.guarded(
        [&] { return pedagogy::generate_feedback(history, st.deps().lib, st.deps().backend); });
    auto menu = offer_menu(st);
    st.agent(join(pedagogy::format_feedback(report), menu));
    st.apply(FeedbackDelivered{report});
}

void open_role_play(Stepper& st, const Scenario& scenario) {
    if (st.state().phase == TaskPhase::RolePlay) st.apply(UserCommand{Command::SwitchRolePlay});
    st.apply(ScenarioChosen{scenario});
    st.agent(converse(st));
}

std::string close_assessment(Stepper& st, const AssessmentResult& result, const std::string& preface) {
    st.set_assessment(result);
    st.apply(SaturationReached{});
    return join(preface, offer_menu(st));
}

const std::string kProvisionalNote =
    "Let's move on to some role-play practice. We can look at your level again once you have had a "
    "chance to speak more.";

void run_assessment(Stepper& st, const TurnInput& in) {
    auto& s = st.state();
    auto& deps = st.deps();
    if (in.speech_seconds) s.assessment_speech_ms += static_cast<std::int64_t>(*in.speech_seconds * 1000.0);
    std::optional<double> speech;
    if (s.assessment_speech_ms > 0) speech = static_cast<double>(s.assessment_speech_ms) / 1000.0;

    if (pedagogy::judge_sufficiency(s.phase_history(), deps.gates, speech, deps.lib, deps.backend)) {
        try {
            auto intro = turns_in(s, TaskPhase::Introduction);
            auto result = st.guarded(
                [&] { return pedagogy::assess_level(intro, s.phase_history(), deps.lib, deps.backend); });
            st.agent(close_assessment(st, result, result.rationale));
            return;
        } catch (const AssessmentError& e) {
            spdlog::warn("assessment produced no level: {}", e.what());
        }
    }
    if (s.phase_turn_count >= s.max_turns_per_phase) {
        st.agent(close_assessment(st, pedagogy::provisional_assessment(s.phase_history()), kProvisionalNote));
        return;
    }
    st.agent(converse(st));
}

void run_selection(Stepper& st, const TurnInput& in) {
    auto& s = st.state();
    auto level = known_level(s).value_or(CefrLevel::B1);
    std::optional<Scenario> chosen = pedagogy::user_specified_scenario(in.text, level);
    if (!chosen && !s.menu.empty()) {
        if (auto idx = pedagogy::match_menu_choice(in.text, s.menu)) chosen = s.menu[*idx];
    }
    if (!chosen && s.phase_turn_count >= s.max_turns_per_phase) {
        if (s.menu.empty()) offer_menu(st);
        chosen = s.menu.front();
    }
    if (chosen) {
        open_role_play(st, *chosen);
        return;
    }
    if (s.menu.empty()) {
        st.agent(offer_menu(st));
    } else {
        st.agent("Which one would you like to try? Say its number or name, or tell me a situation you "
                 "would like to practice.\n\n" + pedagogy::format_menu(s.menu));
    }
}

void run_role_play(Stepper& st, const TurnInput& in) {
    auto& s = st.state();
    auto& deps = st.deps();
    if (s.phase_turn_count >= s.max_turns_per_phase || check_saturation(s, deps)) {
        deliver_feedback(st);
        return;
    }
    pedagogy::ScaffoldContext ctx;
    ctx.phase = TaskPhase::RolePlay;
    auto history = s.phase_history();
    for (std::size_t i = 0; i + 1 < history.size(); ++i) {
        if (history[i].role == Role::Learner) ctx.previous_learner_turns.push_back(history[i].text);
    }
    if (s.active_scenario) ctx.environment = s.active_scenario->environment;
    ctx.low_transcription_confidence = in.low_transcription_confidence;
    auto action = pedagogy::scaffold(in.text, ctx, deps.data);
    st.agent(converse(st, pedagogy::scaffold_directive(action)));
}

}  // namespace

bool check_saturation(const SessionState& state, Deps& deps) {
    if (!forward_phase(state.phase) || state.phase == TaskPhase::Feedback) return false;
    return pedagogy::decide_phase_complete(deps.lib, deps.backend, state.phase, state.phase_history());
}

StepResult open_session(const SessionState& state, Deps& deps) {
    if (!state.short_term.empty()) throw PreconditionError("session already started");
    if (state.phase == TaskPhase::Ended) throw PreconditionError("session has ended");
    Stepper st(state, deps);
    st.mark_reply_start();
    st.agent(converse(st));
    return st.finish();
}

StepResult run_turn(const SessionState& state, const TurnInput& input, Deps& deps) {
    if (state.phase == TaskPhase::Ended) throw PreconditionError("session has ended");
    Stepper st(state, deps);
    st.learner(input);
    st.mark_reply_start();

    if (state.prompt_mode == PromptMode::Single) {
        st.agent(converse(st));
        return st.finish();
    }

    switch (st.state().phase) {
        case TaskPhase::Introduction:
            if (st.state().phase_turn_count >= st.state().max_turns_per_phase ||
                check_saturation(st.state(), deps)) {
                st.apply(SaturationReached{});
            }
            st.agent(converse(st));
            break;
        case TaskPhase::Assessment: run_assessment(st, input); break;
        case TaskPhase::ScenarioSelection: run_selection(st, input); break;
        case TaskPhase::RolePlay: run_role_play(st, input); break;
        case TaskPhase::Feedback: deliver_feedback(st); break;
        case TaskPhase::Ended: break;
    }
    return st.finish();
}

StepResult choose_scenario(const SessionState& state, const Scenario& scenario, Deps& deps) {
    Stepper st(state, deps);
    st.mark_reply_start();
    open_role_play(st, scenario);
    return st.finish();
}

StepResult switch_role_play(const SessionState& state, Deps& deps) {
    Stepper st(state, deps);
    st.mark_reply_start();
    st.apply(UserCommand{Command::SwitchRolePlay});
    st.agent(offer_menu(st));
    return st.finish();
}

StepResult request_scenarios(const SessionState& state, Deps& deps) {
    Stepper st(state, deps);
    st.mark_reply_start();
    st.apply(UserCommand{Command::RequestScenarios});
    st.agent(offer_menu(st));
    return st.finish();
}

StepResult end_session(const SessionState& state, TimePoint at) {
    StepResult out{state, "", {}};
    if (state.phase == TaskPhase::Ended) return out;
    out.state = apply_event(state, UserCommand{Command::EndSession});
    out.notes.push_back(PhaseChanged{state.phase, TaskPhase::Ended});
    // Closing marker so the transcript shows where the session stopped.
    TurnRecord marker{out.state.next_seq(), Role::System, "Session ended.", TaskPhase::Ended, at, at};
    out.state.short_term.push_back(marker);
    out.notes.push_back(TurnAdded{marker});
    return out;
}

StepResult say_agent(const SessionState& state, const std::string& text, Deps& deps) {
    if (state.phase == TaskPhase::Ended) throw PreconditionError("session has ended");
    Stepper st(state, deps);
    st.mark_reply_start();
    st.agent(text);
    return st.finish();
}

StepResult force_transition(const SessionState& state, TaskPhase target, Deps& deps) {
    auto from = state.phase;
    if (target == TaskPhase::Ended) return end_session(state, deps.clock.now());
    if (!validate_transition(from, target)) throw ProtocolError(from, target, "not an edge of the phase graph");
    if (state.prompt_mode == PromptMode::Single) {
        throw ProtocolError(from, target, "single-prompt sessions only accept ending");
    }

    Stepper st(state, deps);
    st.mark_reply_start();
    if (from == TaskPhase::Introduction) {
        st.apply(SaturationReached{});
        st.agent(converse(st));
    } else if (from == TaskPhase::Assessment) {
        st.agent(close_assessment(st, pedagogy::provisional_assessment(state.phase_history()), kProvisionalNote));
    } else if (from == TaskPhase::ScenarioSelection) {
        if (st.state().menu.empty()) offer_menu(st);
        open_role_play(st, st.state().menu.front());
    } else if (from == TaskPhase::RolePlay && target == TaskPhase::ScenarioSelection) {
        st.apply(UserCommand{Command::SwitchRolePlay});
        st.agent(offer_menu(st));
    } else {
        // RolePlay -> Feedback and Feedback -> ScenarioSelection both deliver
        // feedback and land in ScenarioSelection.
        deliver_feedback(st);
    }
    return st.finish();
}

bool cap_pending(const SessionState& state) {
    return state.prompt_mode == PromptMode::Multi && state.phase != TaskPhase::Ended &&
           state.phase_turn_count >= state.max_turns_per_phase;
}

StepResult resolve_cap(const SessionState& state, Deps& deps) {
    if (!cap_pending(state)) throw PreconditionError("no capped transition is pending");
    auto target = forward_phase(state.phase);
    if (state.phase == TaskPhase::ScenarioSelection) target = TaskPhase::RolePlay;
    if (state.phase == TaskPhase::Feedback) target = TaskPhase::ScenarioSelection;
    return force_transition(state, *target, deps);
}

}  // namespace tutor::workflow
