#include "tutor/core/types.hpp"

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"

namespace tutor {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view text, const std::array<std::pair<E, std::string_view>, N>& table) {
    auto lowered = text::to_lower_ascii(text::trim(text));
    for (const auto& [value, name] : table) {
        if (text::to_lower_ascii(name) == lowered) return value;
    }
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

constexpr std::array<std::pair<CefrLevel, std::string_view>, 6> kLevelNames{{
    {CefrLevel::A1, "A1"}, {CefrLevel::A2, "A2"}, {CefrLevel::B1, "B1"},
    {CefrLevel::B2, "B2"}, {CefrLevel::C1, "C1"}, {CefrLevel::C2, "C2"},
}};

constexpr std::array<std::pair<TaskPhase, std::string_view>, 6> kPhaseNames{{
    {TaskPhase::Introduction, "Introduction"},
    {TaskPhase::Assessment, "Assessment"},
    {TaskPhase::ScenarioSelection, "ScenarioSelection"},
    {TaskPhase::RolePlay, "RolePlay"},
    {TaskPhase::Feedback, "Feedback"},
    {TaskPhase::Ended, "Ended"},
}};

constexpr std::array<std::pair<EmotionLabel, std::string_view>, 6> kEmotionNames{{
    {EmotionLabel::Joy, "joy"},
    {EmotionLabel::Sadness, "sadness"},
    {EmotionLabel::Surprise, "surprise"},
    {EmotionLabel::Confusion, "confusion"},
    {EmotionLabel::Frustration, "frustration"},
    {EmotionLabel::Neutral, "neutral"},
}};

constexpr std::array<std::pair<Role, std::string_view>, 3> kRoleNames{{
    {Role::Agent, "agent"}, {Role::Learner, "learner"}, {Role::System, "system"},
}};

constexpr std::array<std::pair<EnvironmentKind, std::string_view>, 7> kEnvironmentNames{{
    {EnvironmentKind::Cafe, "cafe"},
    {EnvironmentKind::Supermarket, "supermarket"},
    {EnvironmentKind::Restaurant, "restaurant"},
    {EnvironmentKind::Street, "street"},
    {EnvironmentKind::Gallery, "gallery"},
    {EnvironmentKind::Office, "office"},
    {EnvironmentKind::Custom, "custom"},
}};

constexpr std::array<std::pair<SummaryKind, std::string_view>, 3> kSummaryKindNames{{
    {SummaryKind::Vocabulary, "vocabulary"},
    {SummaryKind::Grammar, "grammar"},
    {SummaryKind::Sentence, "sentence"},
}};

constexpr std::array<std::pair<PromptMode, std::string_view>, 2> kPromptModeNames{{
    {PromptMode::Single, "single"}, {PromptMode::Multi, "multi"},
}};

constexpr std::array<std::pair<ChatRole, std::string_view>, 3> kChatRoleNames{{
    {ChatRole::System, "system"}, {ChatRole::User, "user"}, {ChatRole::Assistant, "assistant"},
}};

}  // namespace

std::string_view to_string(ChatRole role) { return name_of(role, kChatRoleNames); }
std::optional<ChatRole> chat_role_from_string(std::string_view t) { return lookup(t, kChatRoleNames); }

std::string_view to_string(CefrLevel level) { return name_of(level, kLevelNames); }
std::optional<CefrLevel> cefr_from_string(std::string_view t) { return lookup(t, kLevelNames); }

std::string_view to_string(TaskPhase phase) { return name_of(phase, kPhaseNames); }
std::optional<TaskPhase> phase_from_string(std::string_view t) { return lookup(t, kPhaseNames); }

std::string_view to_string(EmotionLabel label) { return name_of(label, kEmotionNames); }
std::optional<EmotionLabel> emotion_from_string(std::string_view t) { return lookup(t, kEmotionNames); }

std::string_view to_string(Role role) { return name_of(role, kRoleNames); }
std::optional<Role> role_from_string(std::string_view t) { return lookup(t, kRoleNames); }

std::string_view to_string(EnvironmentKind kind) { return name_of(kind, kEnvironmentNames); }
std::optional<EnvironmentKind> environment_from_string(std::string_view t) {
    return lookup(t, kEnvironmentNames);
}

std::string EnvironmentTag::label() const {
    if (kind == EnvironmentKind::Custom) return "custom(" + custom + ")";
    return std::string(to_string(kind));
}

std::string_view to_string(SummaryKind kind) { return name_of(kind, kSummaryKindNames); }
std::optional<SummaryKind> summary_kind_from_string(std::string_view t) {
    return lookup(t, kSummaryKindNames);
}

std::string_view to_string(PromptMode mode) { return name_of(mode, kPromptModeNames); }
std::optional<PromptMode> prompt_mode_from_string(std::string_view t) {
    return lookup(t, kPromptModeNames);
}

void validate(const SessionConfig& config) {
    if (!(config.silence_threshold_s > 0.0))
        throw ConfigError("silence_threshold_s must be positive");
    if (config.max_turns_per_phase < 1) throw ConfigError("max_turns_per_phase must be at least 1");
    if (config.token_window_budget < 1) throw ConfigError("token_window_budget must be positive");
    if (config.voice_id.empty()) throw ConfigError("voice_id must not be empty");
    if (config.session_time_limit_s < 0.0)
        throw ConfigError("session_time_limit_s must not be negative");
}

ProtocolError::ProtocolError(TaskPhase from, TaskPhase to, const std::string& reason)
    : Error("illegal transition " + std::string(to_string(from)) + " -> " +
            std::string(to_string(to)) + (reason.empty() ? "" : ": " + reason)),
      from_(from),
      to_(to) {}

}  // namespace tutor
