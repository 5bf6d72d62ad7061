#include "tutor/prompt/templates.hpp"

#include <regex>

#include "tutor/core/errors.hpp"

namespace tutor::prompt {

namespace {

constexpr std::pair<TemplateId, std::string_view> kTemplateDirs[] = {
    {TemplateId::Persona, "persona"},
    {TemplateId::Introduction, "introduction"},
    {TemplateId::Assessment, "assessment"},
    {TemplateId::ScenarioMenu, "scenario_menu"},
    {TemplateId::RolePlay, "role_play"},
    {TemplateId::Feedback, "feedback"},
    {TemplateId::Decision, "decision"},
    {TemplateId::SinglePrompt, "single_prompt"},
};

const std::regex& slot_pattern() {
    static const std::regex re(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
    return re;
}

}  // namespace

std::string_view to_string(TemplateId id) {
    for (const auto& [tid, name] : kTemplateDirs) {
        if (tid == id) return name;
    }
    return "?";
}

std::vector<std::string> find_slots(std::string_view text) {
    std::vector<std::string> out;
    std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), slot_pattern());
         it != std::sregex_iterator(); ++it) {
        auto name = (*it)[1].str();
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

std::set<std::string> PromptTemplate::slots() const {
    std::set<std::string> out;
    for (const auto& m : messages) {
        for (auto& s : find_slots(m.content)) out.insert(std::move(s));
    }
    return out;
}

PromptLibrary::PromptLibrary(const resources::Resources& res) {
    for (const auto& [id, dir] : kTemplateDirs) {
        auto prefix = "prompts/" + std::string(dir) + "/";
        PromptTemplate tpl{id, {}};
        for (const auto& path : res.list(prefix)) {
            // NN-<role>.txt
            auto file = path.substr(prefix.size());
            auto dash = file.find('-');
            auto dot = file.rfind(".txt");
            if (dash == std::string::npos || dot == std::string::npos || dot < dash)
                throw TemplateError("bad template file name: " + path);
            auto role = chat_role_from_string(file.substr(dash + 1, dot - dash - 1));
            if (!role) throw TemplateError("unknown chat role in " + path);
            auto content = res.read(path);
            for (const auto& slot : find_slots(content)) {
                if (!kSlotNames.contains(slot))
                    throw TemplateError("template " + path + " uses unknown slot {" + slot + "}");
            }
            tpl.messages.push_back({*role, std::move(content)});
        }
        if (tpl.messages.empty())
            throw TemplateError("template '" + std::string(dir) + "' has no messages");
        templates_.emplace(id, std::move(tpl));
    }

    const std::string dprefix = "prompts/directives/";
    for (const auto& path : res.list(dprefix)) {
        auto name = path.substr(dprefix.size());
        if (name.size() > 4 && name.ends_with(".txt")) name.resize(name.size() - 4);
        directives_.emplace(name, res.read(path));
    }
}

const PromptTemplate& PromptLibrary::get(TemplateId id) const { return templates_.at(id); }

const std::string& PromptLibrary::directive(std::string_view name) const {
    auto it = directives_.find(name);
    if (it == directives_.end())
        throw TemplateError("missing prompt directive: " + std::string(name));
    return it->second;
}

}  // namespace tutor::prompt
