#include "tutor/embodiment/emotion.hpp"

#include <toml.hpp>

#include <limits>

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"

namespace tutor::embodiment {

namespace {

bool valid_parameter_name(std::string_view name) {
    if (name.empty()) return false;
    for (unsigned char c : name) {
        if (c <= 0x20 || c >= 0x7F || c == '#') return false;
    }
    return true;
}

toml::table parse_toml(std::string_view text, std::string_view what) {
    try {
        return toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string(what) + ": " + std::string(e.description()));
    }
}

}  // namespace

Lexicon load_lexicon(std::string_view toml_text) {
    auto doc = parse_toml(toml_text, "lexicon");
    auto* keywords = doc["keywords"].as_table();
    if (!keywords) throw ConfigError("lexicon: missing [keywords] table");
    Lexicon lex;
    for (const auto& [key, node] : *keywords) {
        auto label_name = node.value<std::string>();
        if (!label_name) throw ConfigError("lexicon: value for '" + std::string(key.str()) + "' is not a string");
        auto label = emotion_from_string(*label_name);
        if (!label) throw ConfigError("lexicon: unknown emotion label '" + *label_name + "'");
        lex.emplace(text::to_lower_ascii(key.str()), *label);
    }
    return lex;
}

EmotionLabel detect_emotion(std::string_view input, const Lexicon& lexicon) {
    struct Tally {
        std::size_t count = 0;
        std::size_t first = std::numeric_limits<std::size_t>::max();
    };
    std::map<EmotionLabel, Tally> tallies;
    for (const auto& [keyword, label] : lexicon) {
        auto hits = text::find_word_bounded(input, keyword);
        if (hits.empty()) continue;
        auto& t = tallies[label];
        t.count += hits.size();
        t.first = std::min(t.first, hits.front());
    }

    EmotionLabel best = EmotionLabel::Neutral;
    Tally best_tally;
    for (const auto& [label, t] : tallies) {
        if (t.count > best_tally.count || (t.count == best_tally.count && t.first < best_tally.first)) {
            best = label;
            best_tally = t;
        }
    }
    return best;
}

ExpressionTable ExpressionTable::from_toml(std::string_view toml_text) {
    auto doc = parse_toml(toml_text, "expressions");
    auto* root = doc["expressions"].as_table();
    if (!root) throw ConfigError("expressions: missing [expressions] table");

    ExpressionTable out;
    for (const auto& [key, node] : *root) {
        auto label = emotion_from_string(key.str());
        if (!label) throw ConfigError("expressions: unknown emotion label '" + std::string(key.str()) + "'");
        auto* arr = node.as_array();
        if (!arr) throw ConfigError("expressions: '" + std::string(key.str()) + "' must be an array");
        std::vector<ExpressionCommand> commands;
        for (const auto& item : *arr) {
            auto* t = item.as_table();
            if (!t) throw ConfigError("expressions: commands must be inline tables");
            ExpressionCommand cmd;
            cmd.parameter_name = (*t)["parameter"].value_or(std::string{});
            if (!valid_parameter_name(cmd.parameter_name))
                throw ConfigError("expressions: invalid parameter name '" + cmd.parameter_name + "'");
            auto v = (*t)["value"];
            if (auto b = v.as_boolean()) cmd.value = b->get();
            else if (auto i = v.as_integer()) cmd.value = static_cast<std::int32_t>(i->get());
            else if (auto f = v.as_floating_point()) {
                double d = f->get();
                if (d < 0.0 || d > 1.0) throw ConfigError("expressions: float values must lie in [0,1]");
                cmd.value = static_cast<float>(d);
            } else throw ConfigError("expressions: value must be float, integer or boolean");
            cmd.hold_ms = static_cast<int>((*t)["hold_ms"].value_or(std::int64_t{0}));
            if (cmd.hold_ms <= 0) throw ConfigError("expressions: hold_ms must be positive");
            commands.push_back(std::move(cmd));
        }
        out.table_[*label] = std::move(commands);
    }
    for (auto label : kAllEmotions) {
        if (!out.table_.contains(label))
            throw ConfigError("expressions: mapping lacks label '" + std::string(to_string(label)) + "'");
    }
    return out;
}

const std::vector<ExpressionCommand>& ExpressionTable::commands_for(EmotionLabel label) const {
    return table_.at(label);
}

std::vector<ExpressionCommand> map_expression(EmotionLabel emotion, const ExpressionTable& table) {
    if (emotion == EmotionLabel::Neutral) return {};
    return table.commands_for(emotion);
}

OscMessage to_osc(const ExpressionCommand& command) {
    OscMessage m{std::string(kAvatarParameterPrefix) + command.parameter_name, {}};
    std::visit([&](auto v) { m.args.emplace_back(v); }, command.value);
    return m;
}

OscMessage to_osc_reset(const ExpressionCommand& command) {
    OscMessage m{std::string(kAvatarParameterPrefix) + command.parameter_name, {}};
    std::visit([&](auto v) { m.args.emplace_back(decltype(v){}); }, command.value);
    return m;
}

std::vector<OscMessage> chatbox_messages(std::string_view input, std::size_t chunk_chars) {
    if (input.empty()) throw PreconditionError("chatbox text must not be empty");
    if (chunk_chars == 0) throw PreconditionError("chatbox chunk limit must be positive");
    std::vector<OscMessage> out;
    for (auto& chunk : text::utf8_chunks(input, chunk_chars))
        out.push_back({std::string(kChatboxAddress), {std::move(chunk), true}});
    return out;
}

}  // namespace tutor::embodiment
