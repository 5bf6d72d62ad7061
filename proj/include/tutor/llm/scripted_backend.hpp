#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tutor/llm/backend.hpp"

namespace tutor::llm {

struct ScriptEntry {
    std::optional<std::string> match;  // substring of the latest user message
    std::string reply;
};

// Deterministic backend for offline runs. Each call consumes the first
// unconsumed entry that is eligible: entries without `match` always are,
// entries with `match` only when the latest user message contains it. When
// nothing is eligible the call fails with BackendUnavailable.
class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<ScriptEntry> script);

    // JSON array of {"match"?: string, "reply": string}.
    static ScriptedBackend from_json(const std::string& json_text);
    static ScriptedBackend from_file(const std::filesystem::path& path);
    static std::vector<ScriptEntry> parse_script(const std::string& json_text);
    static std::vector<ScriptEntry> load_script(const std::filesystem::path& path);

    std::string name() const override { return "scripted"; }

    std::size_t remaining() const;

    // Every request seen so far, in order.
    std::vector<std::vector<ChatMessage>> calls() const;

protected:
    CompletionResult do_complete(std::span<const ChatMessage> messages,
                                 const CompletionOptions& options) override;

private:
    mutable std::mutex mutex_;
    std::vector<ScriptEntry> script_;
    std::vector<bool> consumed_;
    std::vector<std::vector<ChatMessage>> calls_;
};

}  // namespace tutor::llm
