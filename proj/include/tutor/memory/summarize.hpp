#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tutor/core/types.hpp"
#include "tutor/llm/backend.hpp"
#include "tutor/memory/store.hpp"

namespace tutor::memory {

// Facts about the session that come from engine state, never from model text.
struct SessionFacts {
    std::string session_id;
    std::optional<CefrLevel> assessed_level;
    std::vector<std::string> scenarios_practiced;
    TimePoint created_at{};
};

// One completion over the transcript; the reply becomes summary_text and its
// "- " lines become key_facts. Throws PreconditionError on an empty
// transcript; backend errors propagate.
SessionSummary summarize_session(std::span<const TurnRecord> turns, const LearnerProfile& profile,
                                 const SessionFacts& facts, llm::ChatBackend& backend,
                                 const std::string& persona, const std::string& instruction);

}  // namespace tutor::memory
