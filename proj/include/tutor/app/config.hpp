#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "tutor/core/types.hpp"
#include "tutor/llm/http_backend.hpp"
#include "tutor/pedagogy/pedagogy.hpp"

namespace tutor::app {

struct SpeechConfig {
    std::string stt_endpoint;  // empty: no live STT
    std::string stt_model = "whisper-1";
    std::string tts_endpoint;
    std::string tts_model = "tts-1";
};

struct GatewayConfig {
    std::string host = "127.0.0.1";
    int port = 8787;
};

struct AppConfig {
    SessionConfig session;
    llm::BackendConfig llm;
    SpeechConfig speech;
    GatewayConfig gateway;
    pedagogy::SufficiencyGates gates;
    LearnerProfile learner{"learner"};
    std::optional<std::filesystem::path> data_dir;     // overrides embedded data files
    std::optional<std::filesystem::path> memory_path;  // JSONL store; unset: no long-term memory
    int recall_k = 3;
};

// TOML text to config. Unknown tables or keys and out-of-range values throw
// ConfigError. Relative paths stay relative to the working directory.
AppConfig parse_config(std::string_view toml_text);
AppConfig load_config_file(const std::filesystem::path& path);

// Path named by ELLMA_CONFIG, if set and non-empty.
std::optional<std::filesystem::path> config_path_from_env();

void validate(const AppConfig& config);

}  // namespace tutor::app
