#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tutor/core/types.hpp"
#include "tutor/prompt/templates.hpp"

namespace tutor::prompt {

// Substitutes every {slot} with its bound value. Unbound slots throw
// TemplateError naming the slot; empty bindings are accepted with a warning.
std::vector<ChatMessage> render(const PromptLibrary& lib, TemplateId id, const SlotMap& slots);

// [persona, memory summary?, task..., windowed history]. Task messages that
// repeat the persona verbatim are dropped. History keeps its order and always
// includes the most recent learner turn; the rest is packed into what is left
// of `budget` (approximate tokens, chars/4) after the fixed messages.
std::vector<ChatMessage> compose_request(const ChatMessage& persona,
                                         std::span<const ChatMessage> task,
                                         std::span<const TurnRecord> history,
                                         const std::optional<std::string>& memory_summary,
                                         int budget);

// System+user pair asking for a single YES/NO verdict on whether the
// current phase is done. Only Introduction, Assessment and RolePlay have a
// decision rule; other phases throw TemplateError.
std::vector<ChatMessage> render_decision(const PromptLibrary& lib, TaskPhase phase,
                                         std::span<const TurnRecord> history);

// The monolithic baseline prompt as one system message.
std::vector<ChatMessage> render_single_prompt(const PromptLibrary& lib);

// "User: ...\nTutor: ..." lines, used where a template pastes a history.
std::string format_transcript(std::span<const TurnRecord> turns);

ChatRole chat_role_for(Role role);

}  // namespace tutor::prompt
