#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tutor::text {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool is_word_byte(unsigned char c);  // ASCII letters, digits and underscore

// Whitespace-delimited token count.
std::size_t word_count(std::string_view s);

// Number of UTF-8 code points; continuation bytes are not counted.
std::size_t utf8_length(std::string_view s);

// Splits into pieces of at most `max_chars` code points, never cutting a
// multi-byte sequence.
std::vector<std::string> utf8_chunks(std::string_view s, std::size_t max_chars);

std::vector<std::string> split_lines(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);

// Case-insensitive search for `needle` delimited by non-word bytes on both
// sides. Returns every start offset.
std::vector<std::size_t> find_word_bounded(std::string_view haystack, std::string_view needle);

}  // namespace tutor::text
