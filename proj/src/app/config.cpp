#include "tutor/app/config.hpp"

#include <toml.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tutor/core/errors.hpp"

namespace tutor::app {

namespace {

const std::map<std::string, std::set<std::string>, std::less<>> kSchema = {
    {"session",
     {"silence_threshold_s", "max_turns_per_phase", "prompt_mode", "voice_id", "token_window_budget",
      "osc_target", "log_dir", "session_time_limit_s"}},
    {"llm", {"endpoint_url", "model_id", "timeout_s", "max_retries", "backoff_base_ms", "api_key_env"}},
    {"speech", {"stt_endpoint", "stt_model", "tts_endpoint", "tts_model"}},
    {"gateway", {"host", "port"}},
    {"assessment", {"min_words", "min_speech_s"}},
    {"learner", {"id", "name", "native_language", "cultural_background", "motivation"}},
    {"memory", {"path", "recall"}},
    {"data", {"dir"}},
};

void check_schema(const toml::table& doc) {
    for (const auto& [key, node] : doc) {
        auto it = kSchema.find(key.str());
        if (it == kSchema.end()) throw ConfigError("config: unknown table [" + std::string(key.str()) + "]");
        auto* t = node.as_table();
        if (!t) throw ConfigError("config: '" + std::string(key.str()) + "' must be a table");
        for (const auto& [sub, _] : *t) {
            if (!it->second.contains(std::string(sub.str()))) {
                throw ConfigError("config: unknown key " + std::string(key.str()) + "." + std::string(sub.str()));
            }
        }
    }
}

template <class T>
void read(const toml::table& doc, std::string_view table, std::string_view key, T& out) {
    auto node = doc[table][key];
    if (!node) return;
    if constexpr (std::is_same_v<T, double>) {
        if (auto v = node.value<double>()) { out = *v; return; }
    } else if constexpr (std::is_same_v<T, int>) {
        if (auto v = node.value<std::int64_t>()) { out = static_cast<int>(*v); return; }
    } else {
        if (auto v = node.value<std::string>()) { out = *v; return; }
    }
    throw ConfigError("config: " + std::string(table) + "." + std::string(key) + " has the wrong type");
}

void read_opt(const toml::table& doc, std::string_view table, std::string_view key,
              std::optional<std::string>& out) {
    std::string v;
    bool present = static_cast<bool>(doc[table][key]);
    read(doc, table, key, v);
    if (present && !v.empty()) out = v;
}

}  // namespace

AppConfig parse_config(std::string_view toml_text) {
    toml::table doc;
    try {
        doc = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        throw ConfigError("config: " + std::string(e.description()));
    }
    check_schema(doc);

    AppConfig c;
    auto& s = c.session;
    read(doc, "session", "silence_threshold_s", s.silence_threshold_s);
    read(doc, "session", "max_turns_per_phase", s.max_turns_per_phase);
    std::string mode;
    read(doc, "session", "prompt_mode", mode);
    if (!mode.empty()) {
        auto m = prompt_mode_from_string(mode);
        if (!m) throw ConfigError("config: session.prompt_mode must be single or multi");
        s.prompt_mode = *m;
    }
    read(doc, "session", "voice_id", s.voice_id);
    read(doc, "session", "token_window_budget", s.token_window_budget);
    read(doc, "session", "osc_target", s.osc_target);
    read(doc, "session", "log_dir", s.log_dir);
    read(doc, "session", "session_time_limit_s", s.session_time_limit_s);

    read(doc, "llm", "endpoint_url", c.llm.endpoint_url);
    read(doc, "llm", "model_id", c.llm.model_id);
    read(doc, "llm", "timeout_s", c.llm.timeout_s);
    read(doc, "llm", "max_retries", c.llm.max_retries);
    read(doc, "llm", "backoff_base_ms", c.llm.backoff_base_ms);
    read(doc, "llm", "api_key_env", c.llm.api_key_env);

    read(doc, "speech", "stt_endpoint", c.speech.stt_endpoint);
    read(doc, "speech", "stt_model", c.speech.stt_model);
    read(doc, "speech", "tts_endpoint", c.speech.tts_endpoint);
    read(doc, "speech", "tts_model", c.speech.tts_model);

    read(doc, "gateway", "host", c.gateway.host);
    read(doc, "gateway", "port", c.gateway.port);

    read(doc, "assessment", "min_words", c.gates.min_words);
    if (doc["assessment"]["min_speech_s"]) {
        double v = 0;
        read(doc, "assessment", "min_speech_s", v);
        c.gates.min_speech_s = v > 0 ? std::optional<double>(v) : std::nullopt;
    }

    read(doc, "learner", "id", c.learner.learner_id);
    read_opt(doc, "learner", "name", c.learner.name);
    read_opt(doc, "learner", "native_language", c.learner.native_language);
    read_opt(doc, "learner", "cultural_background", c.learner.cultural_background);
    read_opt(doc, "learner", "motivation", c.learner.motivation);

    std::optional<std::string> path;
    read_opt(doc, "memory", "path", path);
    if (path) c.memory_path = *path;
    read(doc, "memory", "recall", c.recall_k);

    std::optional<std::string> dir;
    read_opt(doc, "data", "dir", dir);
    if (dir) c.data_dir = *dir;

    validate(c);
    return c;
}

AppConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::optional<std::filesystem::path> config_path_from_env() {
    const char* v = std::getenv("ELLMA_CONFIG");
    if (!v || !*v) return std::nullopt;
    return std::filesystem::path(v);
}

void validate(const AppConfig& c) {
    tutor::validate(c.session);
    llm::validate(c.llm);
    if (c.gateway.port < 0 || c.gateway.port > 65535) throw ConfigError("gateway.port out of range");
    if (c.gates.min_words < 0) throw ConfigError("assessment.min_words must be >= 0");
    if (c.learner.learner_id.empty()) throw ConfigError("learner.id must not be empty");
    if (c.recall_k < 1) throw ConfigError("memory.recall must be >= 1");
}

}  // namespace tutor::app
