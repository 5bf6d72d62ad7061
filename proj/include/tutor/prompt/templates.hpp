#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tutor/core/types.hpp"
#include "tutor/resources/resources.hpp"

namespace tutor::prompt {

enum class TemplateId {
    Persona,
    Introduction,
    Assessment,
    ScenarioMenu,
    RolePlay,
    Feedback,
    Decision,
    SinglePrompt,
};

std::string_view to_string(TemplateId id);

// The only slot names a template may reference.
inline const std::set<std::string, std::less<>> kSlotNames = {
    "user_info_conversation", "assessment", "scenario", "role_play_conversations"};

using SlotMap = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
    TemplateId id = TemplateId::Persona;
    std::vector<ChatMessage> messages;  // raw text with {slot} markers

    std::set<std::string> slots() const;
};

// Slot names referenced in `text`, in order of first appearance.
std::vector<std::string> find_slots(std::string_view text);

// Template files live under prompts/<template_id>/NN-<role>.txt; the numeric
// prefix fixes message order and the suffix the chat role. Loose instruction
// snippets used by the engine live under prompts/directives/<name>.txt.
class PromptLibrary {
public:
    // Loads every template; throws TemplateError on unknown slots or roles.
    explicit PromptLibrary(const resources::Resources& res);

    const PromptTemplate& get(TemplateId id) const;
    const std::string& directive(std::string_view name) const;

private:
    std::map<TemplateId, PromptTemplate> templates_;
    std::map<std::string, std::string, std::less<>> directives_;
};

}  // namespace tutor::prompt
