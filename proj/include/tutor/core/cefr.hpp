#pragma once

#include <optional>
#include <string_view>

#include "tutor/core/types.hpp"

namespace tutor {

// First word-bounded CEFR token (A1..C2, any case) in `text`, scanning left
// to right. "between A2 and B1" yields A2.
std::optional<CefrLevel> parse_cefr_label(std::string_view text);

}  // namespace tutor
