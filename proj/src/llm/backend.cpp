#include "tutor/llm/backend.hpp"

#include <chrono>

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"

namespace tutor::llm {

CompletionResult ChatBackend::complete(std::span<const ChatMessage> messages,
                                       const CompletionOptions& options) {
    if (messages.empty()) throw PreconditionError("completion request has no messages");
    if (messages.front().role != ChatRole::System)
        throw PreconditionError("completion request must start with a system message");
    return do_complete(messages, options);
}

std::optional<bool> parse_decision(std::string_view s) {
    std::optional<bool> verdict;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && !text::is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t start = i;
        while (i < s.size() && text::is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
        auto word = text::to_lower_ascii(s.substr(start, i - start));
        if (word == "yes") verdict = true;
        else if (word == "no") verdict = false;
    }
    return verdict;
}

}  // namespace tutor::llm
