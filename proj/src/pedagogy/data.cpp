#include "tutor/pedagogy/data.hpp"

#include <toml.hpp>

#include <set>

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"

namespace tutor::pedagogy {

namespace {

toml::table parse(std::string_view text, std::string_view what) {
    try {
        return toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string(what) + ": " + std::string(e.description()));
    }
}

std::string required_string(const toml::table& t, std::string_view key, std::string_view what) {
    auto v = t[key].value<std::string>();
    if (!v || v->empty()) throw ConfigError(std::string(what) + ": missing '" + std::string(key) + "'");
    return *v;
}

}  // namespace

TopicList parse_topics(std::string_view toml_text) {
    auto doc = parse(toml_text, "topics");
    TopicList out;
    if (auto d = doc["default"].value<std::string>()) out.default_topic = *d;
    if (auto* arr = doc["topic"].as_array()) {
        for (const auto& node : *arr) {
            auto* t = node.as_table();
            if (!t) throw ConfigError("topics: [[topic]] entries must be tables");
            Topic topic{required_string(*t, "text", "topics"), {}};
            if (auto* tags = (*t)["tags"].as_array()) {
                for (const auto& tag : *tags) {
                    if (auto s = tag.value<std::string>()) topic.tags.push_back(text::to_lower_ascii(*s));
                }
            }
            out.topics.push_back(std::move(topic));
        }
    }
    return out;
}

std::vector<Scenario> parse_scenario_library(std::string_view toml_text) {
    auto doc = parse(toml_text, "scenarios");
    std::vector<Scenario> out;
    auto* arr = doc["scenario"].as_array();
    if (!arr) throw ConfigError("scenarios: no [[scenario]] entries");
    for (const auto& node : *arr) {
        auto* t = node.as_table();
        if (!t) throw ConfigError("scenarios: [[scenario]] entries must be tables");
        Scenario s;
        s.scenario_id = required_string(*t, "id", "scenarios");
        s.title = required_string(*t, "title", "scenarios");
        s.agent_role = required_string(*t, "agent_role", "scenarios");
        s.learner_role = required_string(*t, "learner_role", "scenarios");
        s.scene_description = required_string(*t, "scene", "scenarios");
        auto env = required_string(*t, "environment", "scenarios");
        auto kind = environment_from_string(env);
        if (!kind) throw ConfigError("scenarios: unknown environment '" + env + "'");
        s.environment = {*kind, *kind == EnvironmentKind::Custom ? s.title : ""};
        if (text::to_lower_ascii(s.agent_role) == text::to_lower_ascii(s.learner_role))
            throw ConfigError("scenarios: agent and learner roles must differ in " + s.scenario_id);
        out.push_back(std::move(s));
    }
    if (out.size() < 3) throw ConfigError("scenarios: the library needs at least three entries");
    return out;
}

std::map<std::string, std::string> parse_phrases(std::string_view toml_text) {
    auto doc = parse(toml_text, "scenarios");
    std::map<std::string, std::string> out;
    if (auto* t = doc["phrases"].as_table()) {
        for (const auto& [k, v] : *t) {
            if (auto s = v.value<std::string>()) out.emplace(std::string(k.str()), *s);
        }
    }
    if (!out.contains("default")) throw ConfigError("scenarios: [phrases] needs a default entry");
    return out;
}

std::map<CefrLevel, DifficultyDirectives> parse_directives(std::string_view toml_text) {
    auto doc = parse(toml_text, "difficulty");
    std::map<CefrLevel, DifficultyDirectives> out;
    for (auto level : kAllLevels) {
        auto name = std::string(to_string(level));
        auto* t = doc[name].as_table();
        if (!t) throw ConfigError("difficulty: missing level " + name);
        out[level] = {level, required_string(*t, "vocab", "difficulty"),
                      required_string(*t, "sentence_length", "difficulty")};
    }
    return out;
}

PedagogyData PedagogyData::load(const resources::Resources& res) {
    PedagogyData d;
    d.topics = parse_topics(res.read("topics.toml"));
    auto scenarios = res.read("scenarios.toml");
    d.library = parse_scenario_library(scenarios);
    d.phrases = parse_phrases(scenarios);
    d.directives = parse_directives(res.read("difficulty.toml"));
    return d;
}

}  // namespace tutor::pedagogy
