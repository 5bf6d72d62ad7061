#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tutor/core/types.hpp"
#include "tutor/embodiment/osc.hpp"
#include "tutor/resources/resources.hpp"

namespace tutor::embodiment {

using Lexicon = std::map<std::string, EmotionLabel>;

// Keyword lexicon from a TOML [keywords] table. Throws ConfigError on an
// unknown label.
Lexicon load_lexicon(std::string_view toml_text);

// Case-insensitive, word-bounded keyword scan. The label with the most hits
// wins; ties go to the label whose first hit comes earliest. No hit: neutral.
EmotionLabel detect_emotion(std::string_view text, const Lexicon& lexicon);

using ParamValue = std::variant<float, std::int32_t, bool>;

struct ExpressionCommand {
    std::string parameter_name;
    ParamValue value;
    int hold_ms = 0;

    bool operator==(const ExpressionCommand&) const = default;
};

inline constexpr std::string_view kAvatarParameterPrefix = "/avatar/parameters/";
inline constexpr std::string_view kChatboxAddress = "/chatbox/input";

class ExpressionTable {
public:
    // Parses an [expressions] table; every EmotionLabel must be present and
    // every command valid, otherwise ConfigError.
    static ExpressionTable from_toml(std::string_view toml_text);

    const std::vector<ExpressionCommand>& commands_for(EmotionLabel label) const;

private:
    std::map<EmotionLabel, std::vector<ExpressionCommand>> table_;
};

// Commands mirroring `emotion`; neutral maps to none.
std::vector<ExpressionCommand> map_expression(EmotionLabel emotion, const ExpressionTable& table);

OscMessage to_osc(const ExpressionCommand& command);
// The zero value of the same type, sent once the hold expires.
OscMessage to_osc_reset(const ExpressionCommand& command);

// /chatbox/input [text, true] messages, splitting text into chunks of at most
// `chunk_chars` code points. Throws PreconditionError on empty text.
std::vector<OscMessage> chatbox_messages(std::string_view text, std::size_t chunk_chars = 144);

}  // namespace tutor::embodiment
