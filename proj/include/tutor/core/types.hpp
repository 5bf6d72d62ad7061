#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tutor {

using TimePoint = std::chrono::system_clock::time_point;

enum class CefrLevel { A1, A2, B1, B2, C1, C2 };

inline constexpr std::array<CefrLevel, 6> kAllLevels = {
    CefrLevel::A1, CefrLevel::A2, CefrLevel::B1, CefrLevel::B2, CefrLevel::C1, CefrLevel::C2};

std::string_view to_string(CefrLevel level);
std::optional<CefrLevel> cefr_from_string(std::string_view text);

enum class TaskPhase { Introduction, Assessment, ScenarioSelection, RolePlay, Feedback, Ended };

inline constexpr std::array<TaskPhase, 6> kAllPhases = {
    TaskPhase::Introduction, TaskPhase::Assessment, TaskPhase::ScenarioSelection,
    TaskPhase::RolePlay,     TaskPhase::Feedback,   TaskPhase::Ended};

std::string_view to_string(TaskPhase phase);
std::optional<TaskPhase> phase_from_string(std::string_view text);

enum class EmotionLabel { Joy, Sadness, Surprise, Confusion, Frustration, Neutral };

inline constexpr std::array<EmotionLabel, 6> kAllEmotions = {
    EmotionLabel::Joy,       EmotionLabel::Sadness,     EmotionLabel::Surprise,
    EmotionLabel::Confusion, EmotionLabel::Frustration, EmotionLabel::Neutral};

std::string_view to_string(EmotionLabel label);
std::optional<EmotionLabel> emotion_from_string(std::string_view text);

enum class Role { Agent, Learner, System };

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view text);

struct LearnerProfile {
    std::string learner_id;
    std::optional<std::string> name;
    std::optional<std::string> native_language;
    std::optional<std::string> cultural_background;
    std::optional<std::string> motivation;
    std::optional<CefrLevel> assessed_level;

    bool operator==(const LearnerProfile&) const = default;
};

struct TurnRecord {
    std::int64_t seq = 0;
    Role role = Role::Learner;
    std::string text;
    TaskPhase phase = TaskPhase::Introduction;
    TimePoint started_at{};
    TimePoint ended_at{};
    std::optional<std::int64_t> response_latency_ms;
    std::optional<EmotionLabel> emotion;

    bool operator==(const TurnRecord&) const = default;
};

enum class EnvironmentKind { Cafe, Supermarket, Restaurant, Street, Gallery, Office, Custom };

std::string_view to_string(EnvironmentKind kind);
std::optional<EnvironmentKind> environment_from_string(std::string_view text);

struct EnvironmentTag {
    EnvironmentKind kind = EnvironmentKind::Custom;
    std::string custom;  // only meaningful for Custom

    std::string label() const;
    bool operator==(const EnvironmentTag&) const = default;
};

struct Scenario {
    std::string scenario_id;
    std::string title;
    std::string scene_description;
    std::string agent_role;
    std::string learner_role;
    EnvironmentTag environment;
    CefrLevel difficulty = CefrLevel::B1;

    bool operator==(const Scenario&) const = default;
};

struct AssessmentResult {
    CefrLevel level = CefrLevel::A1;
    std::string rationale;
    std::int64_t input_word_count = 0;
    // false: level is provisional and never reaches the learner profile.
    bool sufficient = false;

    bool operator==(const AssessmentResult&) const = default;
};

enum class SummaryKind { Vocabulary, Grammar, Sentence };

std::string_view to_string(SummaryKind kind);
std::optional<SummaryKind> summary_kind_from_string(std::string_view text);

struct LanguageItem {
    std::string item;
    SummaryKind kind = SummaryKind::Vocabulary;

    bool operator==(const LanguageItem&) const = default;
};

struct FeedbackReport {
    struct General {
        std::string strength;
        std::string improvement;
        bool operator==(const General&) const = default;
    };

    General general_feedback;
    std::string advice_moving_forward;
    std::vector<LanguageItem> language_summary;
    bool incomplete = false;

    bool operator==(const FeedbackReport&) const = default;
};

enum class PromptMode { Single, Multi };

std::string_view to_string(PromptMode mode);
std::optional<PromptMode> prompt_mode_from_string(std::string_view text);

enum class ChatRole { System, User, Assistant };

std::string_view to_string(ChatRole role);
std::optional<ChatRole> chat_role_from_string(std::string_view text);

struct ChatMessage {
    ChatRole role = ChatRole::System;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct SessionConfig {
    double silence_threshold_s = 2.0;
    int max_turns_per_phase = 8;
    PromptMode prompt_mode = PromptMode::Multi;
    std::string voice_id = "alloy";
    int token_window_budget = 3000;
    std::string osc_target = "off";  // "off" or host:port
    std::string log_dir = "logs";
    // Optional wall-clock limit; 0 means unlimited.
    double session_time_limit_s = 0.0;
};

// Throws ConfigError when a field is out of range.
void validate(const SessionConfig& config);

}  // namespace tutor
