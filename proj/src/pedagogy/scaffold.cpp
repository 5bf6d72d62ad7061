#include "tutor/core/text.hpp"
#include "tutor/pedagogy/pedagogy.hpp"

namespace tutor::pedagogy {

namespace {

constexpr std::string_view kDistress[] = {
    "i don't know", "i dont know", "don't know how", "can't say", "cant say", "i'm not sure",
    "i forgot", "what is the word", "how do you say", "i don't understand",
};

bool short_turn(std::string_view s) { return text::word_count(s) < 4; }

}  // namespace

ScaffoldAction scaffold(std::string_view learner_turn, const ScaffoldContext& ctx, const PedagogyData& data) {
    if (ctx.phase != TaskPhase::RolePlay) return {};
    if (ctx.low_transcription_confidence) return {ScaffoldKind::ClarifyIntent, text::trim(learner_turn)};

    auto lowered = text::to_lower_ascii(learner_turn);
    for (auto marker : kDistress) {
        if (lowered.find(marker) != std::string::npos) return {ScaffoldKind::Encourage, ""};
    }

    if (short_turn(learner_turn) && !ctx.previous_learner_turns.empty() &&
        short_turn(ctx.previous_learner_turns.back())) {
        std::string phrase;
        if (ctx.environment) {
            auto it = data.phrases.find(ctx.environment->label());
            if (it != data.phrases.end()) phrase = it->second;
        }
        if (phrase.empty()) phrase = data.phrases.at("default");
        return {ScaffoldKind::SuggestPhrase, phrase};
    }
    return {};
}

std::string scaffold_directive(const ScaffoldAction& action) {
    switch (action.kind) {
        case ScaffoldKind::None: return "";
        case ScaffoldKind::Encourage:
            return "The student seems stuck. Stay in character, reassure them briefly and ask a simpler "
                   "question.";
        case ScaffoldKind::SuggestPhrase:
            return "The student is giving very short answers. Stay in character and offer this phrase "
                   "they could use: \"" + action.text + "\"";
        case ScaffoldKind::ClarifyIntent:
            return "The speech recognizer was unsure about the student's last turn (\"" + action.text +
                   "\"). Stay in character and politely check what they meant.";
    }
    return "";
}

}  // namespace tutor::pedagogy
