#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tutor/core/types.hpp"

namespace tutor::llm {

struct CompletionOptions {
    double temperature = 0.7;
};

inline constexpr double kConversationTemperature = 0.7;
inline constexpr double kDecisionTemperature = 0.0;

struct CompletionResult {
    std::string text;
    std::int64_t latency_ms = 0;  // request start to last byte
    bool truncated = false;
};

// A chat-completion backend. Implementations must be safe to call from
// several sessions at once.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    // Throws PreconditionError on an empty list or when the first message is
    // not a system message; BackendUnavailable once retries are exhausted.
    CompletionResult complete(std::span<const ChatMessage> messages,
                              const CompletionOptions& options = {});

    virtual std::string name() const = 0;

protected:
    virtual CompletionResult do_complete(std::span<const ChatMessage> messages,
                                         const CompletionOptions& options) = 0;
};

// Last word-bounded YES/NO token, case-insensitive. "No, not yet. Actually
// NO" is false; text without either token yields nullopt.
std::optional<bool> parse_decision(std::string_view text);

}  // namespace tutor::llm
