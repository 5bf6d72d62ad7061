#pragma once

#include <map>
#include <string>
#include <vector>

#include "tutor/core/types.hpp"
#include "tutor/resources/resources.hpp"

namespace tutor::pedagogy {

struct Topic {
    std::string text;
    std::vector<std::string> tags;
};

struct TopicList {
    std::string default_topic = "describe a memorable experience";
    std::vector<Topic> topics;
};

struct DifficultyDirectives {
    CefrLevel level = CefrLevel::B1;
    std::string vocab_guidance;
    std::string sentence_length_hint;
};

// Tables backing the teaching logic; loaded from topics.toml,
// scenarios.toml and difficulty.toml and validated on load (ConfigError).
struct PedagogyData {
    TopicList topics;
    std::vector<Scenario> library;                 // padding order first
    std::map<std::string, std::string> phrases;    // environment label -> phrase
    std::map<CefrLevel, DifficultyDirectives> directives;

    static PedagogyData load(const resources::Resources& res);
};

TopicList parse_topics(std::string_view toml_text);
std::vector<Scenario> parse_scenario_library(std::string_view toml_text);
std::map<std::string, std::string> parse_phrases(std::string_view toml_text);
std::map<CefrLevel, DifficultyDirectives> parse_directives(std::string_view toml_text);

}  // namespace tutor::pedagogy
