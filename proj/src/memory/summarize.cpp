#include "tutor/memory/summarize.hpp"

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"

namespace tutor::memory {

SessionSummary summarize_session(std::span<const TurnRecord> turns, const LearnerProfile& profile,
                                 const SessionFacts& facts, llm::ChatBackend& backend,
                                 const std::string& persona, const std::string& instruction) {
    if (turns.empty()) throw PreconditionError("cannot summarize a session without turns");

    std::string transcript;
    for (const auto& t : turns) {
        if (t.role == Role::System) continue;
        transcript += t.role == Role::Learner ? "User: " : "Tutor: ";
        transcript += t.text;
        transcript += '\n';
    }
    std::vector<ChatMessage> request = {
        {ChatRole::System, persona},
        {ChatRole::User, instruction + "\n\nSession transcript:\n" + transcript},
    };
    auto reply = backend.complete(request, {llm::kDecisionTemperature});

    SessionSummary s;
    s.learner_id = profile.learner_id;
    s.session_id = facts.session_id;
    s.created_at = facts.created_at;
    s.assessed_level = facts.assessed_level;
    s.scenarios_practiced = facts.scenarios_practiced;
    s.summary_text = text::trim(reply.text);
    for (const auto& line : text::split_lines(reply.text)) {
        auto t = text::trim(line);
        if (t.size() > 2 && t[0] == '-' && t[1] == ' ') s.key_facts.push_back(text::trim(t.substr(2)));
    }
    if (s.summary_text.empty()) throw BackendProtocolError("empty summary from backend", reply.text);
    return s;
}

}  // namespace tutor::memory
