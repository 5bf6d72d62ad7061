#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "tutor/app/protocol.hpp"
#include "tutor/core/clock.hpp"

namespace tutor::app {

// Append-only envelope stream for one session. Listeners run under the log
// lock, in seq order, so they must not block; a subscriber gets its history
// snapshot and its first live envelope without a gap or a duplicate.
class EventLog {
public:
    using Listener = std::function<void(const SessionEventEnvelope&)>;

    EventLog(std::string session_id, Clock& clock) : session_id_(std::move(session_id)), clock_(clock) {}

    SessionEventEnvelope emit(EnvelopeKind kind, json payload);

    // Envelopes with seq >= from_seq, then live delivery to `listener`.
    std::pair<std::vector<SessionEventEnvelope>, int> subscribe(Listener listener, std::int64_t from_seq = 1);
    void unsubscribe(int id);

    std::vector<SessionEventEnvelope> history() const;
    const std::string& session_id() const { return session_id_; }

private:
    std::string session_id_;
    Clock& clock_;
    mutable std::mutex mutex_;
    std::vector<SessionEventEnvelope> log_;
    std::map<int, Listener> listeners_;
    int next_id_ = 1;
};

}  // namespace tutor::app
