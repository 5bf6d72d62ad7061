#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tutor/core/types.hpp"

namespace tutor::memory {

// Rough token estimate: one token per four bytes, rounded up.
std::size_t approx_tokens(std::string_view text);

// Longest suffix of `turns` whose estimated size fits `budget`. The most
// recent learner turn is always kept, even when it alone exceeds the budget,
// which may extend the suffix past the budget. Throws PreconditionError when
// budget <= 0.
std::vector<TurnRecord> window(std::span<const TurnRecord> turns, int budget);

}  // namespace tutor::memory
