#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tutor/app/config.hpp"
#include "tutor/app/host.hpp"

namespace tutor::app {

// WebSocket gateway for the browser console. JSON text frames.
//
// Client -> server:
//   {"type": "subscribe", "session_id": s, "from_seq"?: n}
//   {"type": "unsubscribe", "session_id": s}
//   {"type": "list_sessions"}
//   {"type": "create_session", "session_id"?: s, "learner"?: {...}}
//   operator commands with a "session_id" (see operator_command_from_json)
// Server -> client:
//   session envelopes, in seq order per session;
//   {"type": "ack", "request": ..., "session_id": ...} after a command;
//   {"type": "sessions", "sessions": [{"session_id", "phase"}]};
//   error envelopes with seq 0 for rejections, sent to the requester only.
class Gateway {
public:
    Gateway(Runtime& runtime, GatewayConfig config);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    // Registers and starts (greets) a new session.
    std::shared_ptr<SessionHost> create_session(const std::string& session_id, const LearnerProfile& profile);
    void add_session(std::shared_ptr<SessionHost> host);
    std::shared_ptr<SessionHost> find(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

    // Binds and starts serving on background threads; returns the bound
    // port (useful with port 0).
    int start();
    void stop();
    // Blocks until stop() is called.
    void wait();

private:
    struct Impl;
    friend class Connection;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tutor::app
