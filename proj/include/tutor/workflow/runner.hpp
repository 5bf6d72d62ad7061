#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tutor/core/clock.hpp"
#include "tutor/core/errors.hpp"
#include "tutor/embodiment/emotion.hpp"
#include "tutor/llm/backend.hpp"
#include "tutor/pedagogy/pedagogy.hpp"
#include "tutor/prompt/templates.hpp"
#include "tutor/workflow/session.hpp"

namespace tutor::workflow {

struct Deps {
    const prompt::PromptLibrary& lib;
    llm::ChatBackend& backend;
    const pedagogy::PedagogyData& data;
    Clock& clock;
    const embodiment::Lexicon* lexicon = nullptr;  // null: no emotion tagging
    std::optional<std::string> memory_summary;
    int token_window_budget = 3000;
    pedagogy::SufficiencyGates gates;
};

// Observable side effects of a step, in the order they happened.
struct TurnAdded { TurnRecord turn; };
struct PhaseChanged { TaskPhase from; TaskPhase to; };
struct AssessmentSet { AssessmentResult result; };
struct ScenarioSet { Scenario scenario; };
struct FeedbackReady { FeedbackReport report; };

using Note = std::variant<TurnAdded, PhaseChanged, AssessmentSet, ScenarioSet, FeedbackReady>;

struct StepResult {
    SessionState state;
    std::string agent_output;  // empty when the step produced no agent turn
    std::vector<Note> notes;
};

// Backend failure mid-step. Carries the state as it stood when the failure
// hit (the learner turn is kept) and the notes produced so far.
class TurnFailed : public TurnError {
public:
    TurnFailed(const std::string& what, StepResult partial)
        : TurnError(what), partial_(std::move(partial)) {}
    const StepResult& partial() const { return partial_; }

private:
    StepResult partial_;
};

struct TurnInput {
    std::string text;
    std::optional<TimePoint> started_at;  // both default to clock reads
    std::optional<TimePoint> ended_at;
    std::optional<double> speech_seconds;  // audio timing when known
    bool low_transcription_confidence = false;
};

// Opening agent turn (greeting) for a fresh session.
StepResult open_session(const SessionState& state, Deps& deps);

// Learner turn then agent turn. Transitions triggered by the learner turn
// (cap or decision prompt) are applied before the reply, so the reply comes
// from the phase the session is now in.
StepResult run_turn(const SessionState& state, const TurnInput& input, Deps& deps);

// Decision prompt over the current phase history. False on an unparsable
// reply, a backend failure, or a phase without a decision rule.
bool check_saturation(const SessionState& state, Deps& deps);

// Enters RolePlay with `scenario` and produces the opening role-play turn.
// Switches out of a running role-play first.
StepResult choose_scenario(const SessionState& state, const Scenario& scenario, Deps& deps);

// RolePlay -> ScenarioSelection without feedback, plus a fresh menu.
StepResult switch_role_play(const SessionState& state, Deps& deps);

// New menu while in ScenarioSelection.
StepResult request_scenarios(const SessionState& state, Deps& deps);

// Ends the session and appends a system marker turn stamped `at`.
StepResult end_session(const SessionState& state, TimePoint at);

// A fixed agent line outside the model loop, e.g. asking the learner to
// repeat after a failed transcription.
StepResult say_agent(const SessionState& state, const std::string& text, Deps& deps);

// Operator override along one edge of the phase graph. Forward edges run the
// same work as a natural transition (provisional assessment, feedback).
StepResult force_transition(const SessionState& state, TaskPhase target, Deps& deps);

// True when a failed step left the phase at its learner-turn cap, so another
// learner turn would be rejected until the capped transition has run.
bool cap_pending(const SessionState& state);

// Runs the transition the cap would have triggered, producing its agent turn.
StepResult resolve_cap(const SessionState& state, Deps& deps);

}  // namespace tutor::workflow
