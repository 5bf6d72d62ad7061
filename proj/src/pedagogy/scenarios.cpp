#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"
#include "tutor/pedagogy/pedagogy.hpp"
#include "tutor/prompt/engine.hpp"

namespace tutor::pedagogy {

namespace {

struct EnvKeywords {
    EnvironmentKind kind;
    std::vector<std::string_view> words;
};

const std::vector<EnvKeywords>& env_keywords() {
    static const std::vector<EnvKeywords> table = {
        {EnvironmentKind::Restaurant, {"restaurant", "food", "dinner", "lunch", "menu", "waiter", "diner"}},
        {EnvironmentKind::Cafe, {"cafe", "café", "coffee", "barista", "tea", "bakery"}},
        {EnvironmentKind::Supermarket, {"supermarket", "grocery", "groceries", "shopping", "shop", "store", "market"}},
        {EnvironmentKind::Office, {"interview", "office", "job", "work", "meeting", "colleague", "business"}},
        {EnvironmentKind::Gallery, {"gallery", "museum", "art", "painting", "exhibition"}},
        {EnvironmentKind::Street, {"travel", "traveling", "travelling", "street", "directions", "city", "tourist", "country", "trip"}},
    };
    return table;
}

// Strips list markers and markdown emphasis from a line.
std::string clean_line(std::string_view line) {
    std::string s;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '*' ) continue;
        s += line[i];
    }
    s = text::trim(s);
    std::size_t i = 0;
    while (i < s.size() && (s[i] == '-' || s[i] == '#' || s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i && j < s.size() && (s[j] == '.' || s[j] == ')')) i = j + 1;
    return text::trim(std::string_view(s).substr(i));
}

std::optional<std::string> field(std::string_view line, std::string_view label) {
    if (!text::starts_with_icase(line, label)) return std::nullopt;
    auto rest = line.substr(label.size());
    auto t = text::trim(rest);
    if (t.empty() || t.front() != ':') return std::nullopt;
    return text::trim(std::string_view(t).substr(1));
}

std::string slug(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (text::is_word_byte(c)) out += static_cast<char>(std::tolower(c));
        else if (!out.empty() && out.back() != '-') out += '-';
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "scenario" : out;
}

bool valid(const Scenario& s) {
    return !s.title.empty() && !s.scene_description.empty() && !s.agent_role.empty() &&
           !s.learner_role.empty() &&
           text::to_lower_ascii(s.agent_role) != text::to_lower_ascii(s.learner_role);
}

}  // namespace

EnvironmentTag infer_environment(std::string_view title) {
    for (const auto& entry : env_keywords()) {
        for (auto w : entry.words) {
            if (!text::find_word_bounded(title, w).empty()) return {entry.kind, ""};
        }
    }
    return {EnvironmentKind::Custom, text::trim(title)};
}

std::vector<Scenario> parse_scenarios(std::string_view reply, CefrLevel difficulty) {
    std::vector<Scenario> out;
    std::optional<Scenario> current;
    auto finish = [&] {
        if (current && valid(*current)) {
            current->environment = infer_environment(current->title);
            current->difficulty = difficulty;
            current->scenario_id = "gen-" + slug(current->title);
            bool dup = std::any_of(out.begin(), out.end(), [&](const Scenario& s) {
                return text::to_lower_ascii(s.title) == text::to_lower_ascii(current->title);
            });
            if (!dup) out.push_back(std::move(*current));
        }
        current.reset();
    };

    for (const auto& raw : text::split_lines(reply)) {
        auto line = clean_line(raw);
        if (auto v = field(line, "Title")) {
            finish();
            current = Scenario{};
            current->title = *v;
        } else if (!current) {
            continue;
        } else if (auto v = field(line, "You are")) {
            current->agent_role = *v;
        } else if (auto v = field(line, "I am")) {
            current->learner_role = *v;
        } else if (auto v = field(line, "Scene")) {
            current->scene_description = *v;
        } else if (!line.empty() && !current->scene_description.empty()) {
            current->scene_description += " " + line;
        }
    }
    finish();
    return out;
}

std::vector<Scenario> scenario_menu(const LearnerProfile&, std::optional<CefrLevel> level,
                                    const PedagogyData& data, const prompt::PromptLibrary& lib,
                                    llm::ChatBackend& backend) {
    auto difficulty = level.value_or(CefrLevel::B1);
    std::vector<Scenario> menu;
    try {
        auto messages = prompt::render(lib, prompt::TemplateId::ScenarioMenu, {});
        messages.push_back({ChatRole::User, lib.directive("scenario_format")});
        auto reply = backend.complete(messages, {llm::kConversationTemperature});
        menu = parse_scenarios(reply.text, difficulty);
    } catch (const Error& e) {
        spdlog::warn("scenario menu generation failed, using the built-in library: {}", e.what());
    }
    if (menu.size() > 3) menu.resize(3);

    for (const auto& lib_scenario : data.library) {
        if (menu.size() >= 3) break;
        bool taken = std::any_of(menu.begin(), menu.end(), [&](const Scenario& s) {
            return s.environment == lib_scenario.environment ||
                   text::to_lower_ascii(s.title) == text::to_lower_ascii(lib_scenario.title);
        });
        if (taken) continue;
        auto s = lib_scenario;
        s.difficulty = difficulty;
        menu.push_back(std::move(s));
    }
    // Library exhausted by tag clashes: allow duplicates of environment.
    for (std::size_t i = 0; menu.size() < 3 && i < data.library.size(); ++i) {
        auto s = data.library[i];
        s.difficulty = difficulty;
        if (std::find(menu.begin(), menu.end(), s) == menu.end()) menu.push_back(std::move(s));
    }
    return menu;
}

std::optional<Scenario> user_specified_scenario(std::string_view learner_text, CefrLevel difficulty) {
    static const std::vector<std::string_view> cues = {
        "i would like to practice ", "i'd like to practice ", "i want to practice ",
        "can we practice ",          "could we practice ",    "let's practice ",
        "i would like to practise ", "i'd like to practise ", "i want to practise ",
        "let's practise ",
    };
    auto lowered = text::to_lower_ascii(learner_text);
    for (auto cue : cues) {
        auto pos = lowered.find(cue);
        if (pos == std::string::npos) continue;
        auto rest = text::trim(std::string_view(learner_text).substr(pos + cue.size()));
        while (!rest.empty() && (rest.back() == '.' || rest.back() == '!' || rest.back() == '?'))
            rest.pop_back();
        rest = text::trim(rest);
        if (rest.empty()) return std::nullopt;
        Scenario s;
        s.title = rest;
        s.scenario_id = "custom-" + slug(rest);
        s.scene_description = "A role-play about " + rest + ", set up the way the learner asked.";
        s.agent_role = "conversation partner";
        s.learner_role = "learner";
        s.environment = infer_environment(rest);
        s.difficulty = difficulty;
        return s;
    }
    return std::nullopt;
}

std::optional<std::size_t> match_menu_choice(std::string_view learner_text, std::span<const Scenario> menu) {
    static const std::vector<std::pair<std::string_view, std::size_t>> ordinals = {
        {"1", 0}, {"one", 0}, {"first", 0}, {"2", 1}, {"two", 1}, {"second", 1},
        {"3", 2}, {"three", 2}, {"third", 2},
    };
    std::optional<std::size_t> by_ordinal;
    std::size_t earliest = std::string::npos;
    for (const auto& [word, idx] : ordinals) {
        auto hits = text::find_word_bounded(learner_text, word);
        if (!hits.empty() && hits.front() < earliest && idx < menu.size()) {
            earliest = hits.front();
            by_ordinal = idx;
        }
    }
    if (by_ordinal) return by_ordinal;

    std::optional<std::size_t> best;
    std::size_t best_score = 0;
    bool tie = false;
    for (std::size_t i = 0; i < menu.size(); ++i) {
        std::size_t score = 0;
        std::string word;
        auto consider = [&] {
            if (word.size() >= 4 && !text::find_word_bounded(learner_text, word).empty()) ++score;
            word.clear();
        };
        for (unsigned char c : menu[i].title) {
            if (text::is_word_byte(c)) word += static_cast<char>(c);
            else consider();
        }
        consider();
        if (score > best_score) {
            best_score = score;
            best = i;
            tie = false;
        } else if (score > 0 && score == best_score) {
            tie = true;
        }
    }
    if (tie) return std::nullopt;
    return best;
}

std::string format_menu(std::span<const Scenario> menu) {
    std::string out = "Here are three scenarios we could practice:";
    for (std::size_t i = 0; i < menu.size(); ++i) {
        out += "\n" + std::to_string(i + 1) + ". " + menu[i].title + ": " + menu[i].scene_description +
               " (I'm the " + menu[i].agent_role + ", you're the " + menu[i].learner_role + ".)";
    }
    out += "\nWhich one would you like to try? You can also suggest your own.";
    return out;
}

std::string describe_scenario(const Scenario& s) {
    return s.title + ". " + s.scene_description + " You play the " + s.agent_role +
           " and the user plays the " + s.learner_role + ".";
}

}  // namespace tutor::pedagogy
