#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tutor/core/types.hpp"
#include "tutor/llm/backend.hpp"
#include "tutor/pedagogy/data.hpp"
#include "tutor/prompt/templates.hpp"

namespace tutor::pedagogy {

// ---- assessment --------------------------------------------------------

struct SufficiencyGates {
    int min_words = 40;
    std::optional<double> min_speech_s = 30.0;
};

// Default topic, or the first topic whose tag appears as a word in the
// learner's motivation.
std::string assessment_topic(const LearnerProfile& profile, const TopicList& topics);

std::int64_t learner_word_count(std::span<const TurnRecord> history);

// Asks the decision prompt whether `phase` is done. Unparsable replies and
// backend failures count as "not done".
bool decide_phase_complete(const prompt::PromptLibrary& lib, llm::ChatBackend& backend,
                           TaskPhase phase, std::span<const TurnRecord> history);

// Local gate (learner words >= min_words, or cumulative speech time >=
// min_speech_s when timing is known) AND a YES from the decision prompt.
// The backend is only consulted once the local gate passes.
bool judge_sufficiency(std::span<const TurnRecord> history, const SufficiencyGates& gates,
                       std::optional<double> speech_seconds, const prompt::PromptLibrary& lib,
                       llm::ChatBackend& backend);

// One completion over the assessment template; the level is the first CEFR
// token in the reply. A reply without one is retried once with a stricter
// instruction, then AssessmentError.
AssessmentResult assess_level(std::span<const TurnRecord> intro_history,
                              std::span<const TurnRecord> assessment_history,
                              const prompt::PromptLibrary& lib, llm::ChatBackend& backend);

// Result used when the phase cap closes an assessment that never had enough
// input: A1, flagged insufficient.
AssessmentResult provisional_assessment(std::span<const TurnRecord> assessment_history);

// ---- scenarios ---------------------------------------------------------

EnvironmentTag infer_environment(std::string_view title);

// Title / You are / I am / Scene blocks. Invalid blocks are skipped.
std::vector<Scenario> parse_scenarios(std::string_view reply, CefrLevel difficulty);

// Exactly three scenarios: parsed from the completion, padded from the
// library. Backend failure means a full fallback.
std::vector<Scenario> scenario_menu(const LearnerProfile& profile, std::optional<CefrLevel> level,
                                    const PedagogyData& data, const prompt::PromptLibrary& lib,
                                    llm::ChatBackend& backend);

// "I want to practice renting an apartment" -> custom scenario.
std::optional<Scenario> user_specified_scenario(std::string_view learner_text, CefrLevel difficulty);

// Index of the menu entry the learner picked, by ordinal or title words.
std::optional<std::size_t> match_menu_choice(std::string_view learner_text,
                                             std::span<const Scenario> menu);

std::string format_menu(std::span<const Scenario> menu);

// Text bound to the role-play template's {scenario} slot.
std::string describe_scenario(const Scenario& scenario);

// ---- difficulty --------------------------------------------------------

const DifficultyDirectives& difficulty_directives(CefrLevel level, const PedagogyData& data);

// Text bound to the role-play template's {assessment} slot.
std::string assessment_slot(const AssessmentResult& result, const PedagogyData& data);

// ---- scaffolding -------------------------------------------------------

enum class ScaffoldKind { None, Encourage, SuggestPhrase, ClarifyIntent };

struct ScaffoldAction {
    ScaffoldKind kind = ScaffoldKind::None;
    std::string text;  // phrase for SuggestPhrase, quoted fragment for ClarifyIntent

    bool operator==(const ScaffoldAction&) const = default;
};

struct ScaffoldContext {
    TaskPhase phase = TaskPhase::RolePlay;
    // Learner turns already recorded in this role-play, oldest first,
    // excluding the current one.
    std::vector<std::string> previous_learner_turns;
    std::optional<EnvironmentTag> environment;
    bool low_transcription_confidence = false;
};

// Local triggers, in priority order: low transcription confidence ->
// ClarifyIntent; distress markers ("I don't know", "can't say") ->
// Encourage; this and the previous learner turn both under 4 words ->
// SuggestPhrase; otherwise None. Outside RolePlay always None.
ScaffoldAction scaffold(std::string_view learner_turn, const ScaffoldContext& context,
                        const PedagogyData& data);

// Extra system instruction for the role-play request, empty for None.
std::string scaffold_directive(const ScaffoldAction& action);

// ---- feedback ----------------------------------------------------------

// Header-based parse; headers match case-insensitively with or without
// markdown emphasis. `incomplete` is set when any section is missing.
FeedbackReport parse_feedback(std::string_view text);

// Canonical text form; parse_feedback(format_feedback(r)) == r.
std::string format_feedback(const FeedbackReport& report);

// Feedback template with the role-play transcript pasted in; one retry on a
// partial parse, after which the partial report is returned flagged
// incomplete. PreconditionError on empty history.
FeedbackReport generate_feedback(std::span<const TurnRecord> role_play_history,
                                 const prompt::PromptLibrary& lib, llm::ChatBackend& backend);

}  // namespace tutor::pedagogy
