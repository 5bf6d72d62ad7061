#include "tutor/memory/window.hpp"

#include "tutor/core/errors.hpp"

namespace tutor::memory {

std::size_t approx_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::vector<TurnRecord> window(std::span<const TurnRecord> turns, int budget) {
    if (budget <= 0) throw PreconditionError("window budget must be positive");

    std::size_t start = turns.size();
    std::size_t used = 0;
    while (start > 0) {
        auto cost = approx_tokens(turns[start - 1].text);
        if (used + cost > static_cast<std::size_t>(budget)) break;
        used += cost;
        --start;
    }

    for (std::size_t i = turns.size(); i-- > 0;) {
        if (turns[i].role == Role::Learner) {
            if (i < start) start = i;
            break;
        }
    }
    return {turns.begin() + static_cast<std::ptrdiff_t>(start), turns.end()};
}

}  // namespace tutor::memory
