#include "tutor/core/text.hpp"

#include <algorithm>
#include <cctype>

namespace tutor::text {

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::size_t word_count(std::string_view s) {
    std::size_t count = 0;
    bool in_word = false;
    for (unsigned char c : s) {
        bool space = std::isspace(c) != 0;
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

std::size_t utf8_length(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(
        s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::vector<std::string> utf8_chunks(std::string_view s, std::size_t max_chars) {
    std::vector<std::string> out;
    if (max_chars == 0) return out;
    std::size_t start = 0, chars = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool lead = (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80;
        if (lead) {
            if (chars == max_chars) {
                out.emplace_back(s.substr(start, i - start));
                start = i;
                chars = 0;
            }
            ++chars;
        }
    }
    if (start < s.size()) out.emplace_back(s.substr(start));
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(s.substr(start));
            break;
        }
        auto line = s.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = nl + 1;
    }
    return lines;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    return to_lower_ascii(s.substr(0, prefix.size())) == to_lower_ascii(prefix);
}

std::vector<std::size_t> find_word_bounded(std::string_view haystack, std::string_view needle) {
    std::vector<std::size_t> hits;
    if (needle.empty()) return hits;
    auto hay = to_lower_ascii(haystack);
    auto pat = to_lower_ascii(needle);
    std::size_t pos = 0;
    while ((pos = hay.find(pat, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(hay[pos - 1])) ||
                       !is_word_byte(static_cast<unsigned char>(pat.front()));
        std::size_t end = pos + pat.size();
        bool right_ok = end >= hay.size() || !is_word_byte(static_cast<unsigned char>(hay[end])) ||
                        !is_word_byte(static_cast<unsigned char>(pat.back()));
        if (left_ok && right_ok) hits.push_back(pos);
        ++pos;
    }
    return hits;
}

}  // namespace tutor::text
