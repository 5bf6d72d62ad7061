#include "tutor/llm/scripted_backend.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tutor/core/errors.hpp"

namespace tutor::llm {

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> script)
    : script_(std::move(script)), consumed_(script_.size(), false) {}

std::vector<ScriptEntry> ScriptedBackend::parse_script(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scripted backend: bad JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigError("scripted backend: script must be a JSON array");
    std::vector<ScriptEntry> entries;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("reply") || !item["reply"].is_string())
            throw ConfigError("scripted backend: every entry needs a string \"reply\"");
        ScriptEntry e;
        e.reply = item["reply"].get<std::string>();
        if (item.contains("match") && !item["match"].is_null())
            e.match = item["match"].get<std::string>();
        entries.push_back(std::move(e));
    }
    return entries;
}

ScriptedBackend ScriptedBackend::from_json(const std::string& json_text) {
    return ScriptedBackend(parse_script(json_text));
}

std::vector<ScriptEntry> ScriptedBackend::load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open script " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str());
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    return ScriptedBackend(load_script(path));
}

std::size_t ScriptedBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count(consumed_.begin(), consumed_.end(), false));
}

std::vector<std::vector<ChatMessage>> ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

CompletionResult ScriptedBackend::do_complete(std::span<const ChatMessage> messages,
                                              const CompletionOptions&) {
    std::lock_guard lock(mutex_);
    calls_.emplace_back(messages.begin(), messages.end());

    std::string_view latest_user;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == ChatRole::User) {
            latest_user = it->content;
            break;
        }
    }

    for (std::size_t i = 0; i < script_.size(); ++i) {
        if (consumed_[i]) continue;
        const auto& entry = script_[i];
        if (entry.match && latest_user.find(*entry.match) == std::string_view::npos) continue;
        consumed_[i] = true;
        return {entry.reply, 0, false};
    }
    throw BackendUnavailable("scripted backend: no eligible script entry left");
}

}  // namespace tutor::llm
