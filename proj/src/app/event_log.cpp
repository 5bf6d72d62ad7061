#include "tutor/app/event_log.hpp"

namespace tutor::app {

SessionEventEnvelope EventLog::emit(EnvelopeKind kind, json payload) {
    std::lock_guard lock(mutex_);
    SessionEventEnvelope e{session_id_, static_cast<std::int64_t>(log_.size()) + 1, kind, std::move(payload),
                           format_iso8601(clock_.now())};
    log_.push_back(e);
    for (auto& [id, listener] : listeners_) listener(e);
    return e;
}

std::pair<std::vector<SessionEventEnvelope>, int> EventLog::subscribe(Listener listener, std::int64_t from_seq) {
    std::lock_guard lock(mutex_);
    std::vector<SessionEventEnvelope> snapshot;
    for (const auto& e : log_) {
        if (e.seq >= from_seq) snapshot.push_back(e);
    }
    int id = next_id_++;
    listeners_.emplace(id, std::move(listener));
    return {std::move(snapshot), id};
}

void EventLog::unsubscribe(int id) {
    std::lock_guard lock(mutex_);
    listeners_.erase(id);
}

std::vector<SessionEventEnvelope> EventLog::history() const {
    std::lock_guard lock(mutex_);
    return log_;
}

}  // namespace tutor::app
