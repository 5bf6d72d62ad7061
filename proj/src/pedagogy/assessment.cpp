#include <spdlog/spdlog.h>

#include "tutor/core/cefr.hpp"
#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"
#include "tutor/pedagogy/pedagogy.hpp"
#include "tutor/prompt/engine.hpp"

namespace tutor::pedagogy {

std::string assessment_topic(const LearnerProfile& profile, const TopicList& topics) {
    if (!profile.motivation || topics.topics.empty()) return topics.default_topic;
    for (const auto& topic : topics.topics) {
        for (const auto& tag : topic.tags) {
            if (!text::find_word_bounded(*profile.motivation, tag).empty()) return topic.text;
        }
    }
    return topics.default_topic;
}

std::int64_t learner_word_count(std::span<const TurnRecord> history) {
    std::int64_t words = 0;
    for (const auto& t : history) {
        if (t.role == Role::Learner) words += static_cast<std::int64_t>(text::word_count(t.text));
    }
    return words;
}

bool decide_phase_complete(const prompt::PromptLibrary& lib, llm::ChatBackend& backend,
                           TaskPhase phase, std::span<const TurnRecord> history) {
    auto messages = prompt::render_decision(lib, phase, history);
    try {
        auto reply = backend.complete(messages, {llm::kDecisionTemperature});
        return llm::parse_decision(reply.text).value_or(false);
    } catch (const Error& e) {
        spdlog::warn("decision prompt for {} failed, staying in phase: {}", to_string(phase), e.what());
        return false;
    }
}

bool judge_sufficiency(std::span<const TurnRecord> history, const SufficiencyGates& gates,
                       std::optional<double> speech_seconds, const prompt::PromptLibrary& lib,
                       llm::ChatBackend& backend) {
    bool enough_words = learner_word_count(history) >= gates.min_words;
    bool enough_speech = speech_seconds && gates.min_speech_s && *speech_seconds >= *gates.min_speech_s;
    if (!enough_words && !enough_speech) return false;
    return decide_phase_complete(lib, backend, TaskPhase::Assessment, history);
}

AssessmentResult assess_level(std::span<const TurnRecord> intro_history,
                              std::span<const TurnRecord> assessment_history,
                              const prompt::PromptLibrary& lib, llm::ChatBackend& backend) {
    auto messages = prompt::render(lib, prompt::TemplateId::Assessment,
                                   {{"user_info_conversation", prompt::format_transcript(intro_history)}});
    for (const auto& t : assessment_history) {
        if (t.role == Role::System || t.text.empty()) continue;
        messages.push_back({prompt::chat_role_for(t.role), t.text});
    }
    messages.push_back({ChatRole::User, lib.directive("assessment_verdict")});

    for (int attempt = 0; attempt < 2; ++attempt) {
        auto reply = backend.complete(messages, {llm::kConversationTemperature});
        if (auto level = parse_cefr_label(reply.text)) {
            return {*level, text::trim(reply.text), learner_word_count(assessment_history), true};
        }
        messages.push_back({ChatRole::Assistant, reply.text.empty() ? std::string("(no answer)") : reply.text});
        messages.push_back({ChatRole::User, lib.directive("assessment_retry")});
    }
    throw AssessmentError("assessment reply named no CEFR level after a retry");
}

AssessmentResult provisional_assessment(std::span<const TurnRecord> assessment_history) {
    return {CefrLevel::A1,
            "Provisional: the learner did not give enough input for an assessment before the phase "
            "limit.",
            learner_word_count(assessment_history), false};
}

const DifficultyDirectives& difficulty_directives(CefrLevel level, const PedagogyData& data) {
    return data.directives.at(level);
}

std::string assessment_slot(const AssessmentResult& result, const PedagogyData& data) {
    const auto& d = difficulty_directives(result.level, data);
    std::string out = "CEFR level " + std::string(to_string(result.level));
    if (!result.sufficient) out += " (provisional)";
    out += ". " + d.vocab_guidance + " " + d.sentence_length_hint;
    return out;
}

}  // namespace tutor::pedagogy
