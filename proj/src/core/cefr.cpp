#include "tutor/core/cefr.hpp"

#include "tutor/core/text.hpp"

namespace tutor {

std::optional<CefrLevel> parse_cefr_label(std::string_view text) {
    auto is_word = [](unsigned char c) { return text::is_word_byte(c); };
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        char letter = static_cast<char>(text[i] & ~0x20);  // ASCII upper
        char digit = text[i + 1];
        if (letter < 'A' || letter > 'C' || digit < '1' || digit > '2') continue;
        if (i > 0 && is_word(static_cast<unsigned char>(text[i - 1]))) continue;
        if (i + 2 < text.size() && is_word(static_cast<unsigned char>(text[i + 2]))) continue;
        int index = (letter - 'A') * 2 + (digit - '1');
        return kAllLevels[static_cast<std::size_t>(index)];
    }
    return std::nullopt;
}

}  // namespace tutor
