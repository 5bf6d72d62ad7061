#include "tutor/prompt/engine.hpp"

#include <spdlog/spdlog.h>

#include <regex>

#include "tutor/core/errors.hpp"
#include "tutor/memory/window.hpp"

namespace tutor::prompt {

namespace {

std::string substitute(const std::string& text, const SlotMap& slots, TemplateId id) {
    static const std::regex re(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
    std::string out;
    out.reserve(text.size());
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
         ++it) {
        const auto& m = *it;
        out.append(text, last, static_cast<std::size_t>(m.position(0)) - last);
        auto name = m[1].str();
        auto bound = slots.find(name);
        if (bound == slots.end())
            throw TemplateError("unbound slot {" + name + "} in template " +
                                std::string(to_string(id)));
        if (bound->second.empty())
            spdlog::warn("slot {{{}}} in template {} bound to an empty string", name,
                         to_string(id));
        out += bound->second;
        last = static_cast<std::size_t>(m.position(0) + m.length(0));
    }
    out.append(text, last);
    return out;
}

std::string_view decision_criterion(TaskPhase phase) {
    switch (phase) {
        case TaskPhase::Introduction:
            return "Introduction. The tutor is getting to know the learner: their name, cultural "
                   "background and why they are learning English. The task is complete once "
                   "these are known or the learner wants to move on.";
        case TaskPhase::Assessment:
            return "Language assessment. The learner is speaking freely about a topic so their "
                   "spoken English can be given a CEFR level. The task is complete once the "
                   "learner has spoken long enough for a reliable assessment.";
        case TaskPhase::RolePlay:
            return "Role-play. The tutor and learner act out a real-life scenario. The task is "
                   "complete once the scenario has reached a natural end or the learner wants "
                   "to stop.";
        default:
            return {};
    }
}

}  // namespace

ChatRole chat_role_for(Role role) {
    switch (role) {
        case Role::Learner: return ChatRole::User;
        case Role::Agent: return ChatRole::Assistant;
        case Role::System: return ChatRole::System;
    }
    return ChatRole::System;
}

std::vector<ChatMessage> render(const PromptLibrary& lib, TemplateId id, const SlotMap& slots) {
    std::vector<ChatMessage> out;
    for (const auto& m : lib.get(id).messages) out.push_back({m.role, substitute(m.content, slots, id)});
    return out;
}

std::vector<ChatMessage> compose_request(const ChatMessage& persona,
                                         std::span<const ChatMessage> task,
                                         std::span<const TurnRecord> history,
                                         const std::optional<std::string>& memory_summary,
                                         int budget) {
    if (budget <= 0) throw PreconditionError("compose_request budget must be positive");

    std::vector<ChatMessage> out{persona};
    std::size_t fixed = memory::approx_tokens(persona.content);
    if (memory_summary && !memory_summary->empty()) {
        out.push_back({ChatRole::System, *memory_summary});
        fixed += memory::approx_tokens(*memory_summary);
    }
    for (const auto& m : task) {
        if (m.role == persona.role && m.content == persona.content) continue;
        out.push_back(m);
        fixed += memory::approx_tokens(m.content);
    }

    int history_budget = budget > static_cast<int>(fixed) ? budget - static_cast<int>(fixed) : 1;
    for (const auto& turn : memory::window(history, history_budget)) {
        if (turn.text.empty()) continue;
        out.push_back({chat_role_for(turn.role), turn.text});
    }
    return out;
}

std::vector<ChatMessage> render_decision(const PromptLibrary& lib, TaskPhase phase,
                                         std::span<const TurnRecord> history) {
    auto criterion = decision_criterion(phase);
    if (criterion.empty())
        throw TemplateError("no decision rule for phase " + std::string(to_string(phase)));

    const auto& tpl = lib.get(TemplateId::Decision).messages;
    if (tpl.size() != 2 || tpl[0].role != ChatRole::System || tpl[1].role != ChatRole::User)
        throw TemplateError("decision template must be a system+user pair");

    std::string system = tpl[0].content + "\n\nCurrent task: " + std::string(criterion);
    std::string user = "Conversation:\n" + format_transcript(history) + "\n\n" + tpl[1].content;
    return {{ChatRole::System, std::move(system)}, {ChatRole::User, std::move(user)}};
}

std::vector<ChatMessage> render_single_prompt(const PromptLibrary& lib) {
    return render(lib, TemplateId::SinglePrompt, {});
}

std::string format_transcript(std::span<const TurnRecord> turns) {
    std::string out;
    for (const auto& t : turns) {
        if (t.role == Role::System) continue;
        if (!out.empty()) out += '\n';
        out += t.role == Role::Learner ? "User: " : "Tutor: ";
        out += t.text;
    }
    return out;
}

}  // namespace tutor::prompt
