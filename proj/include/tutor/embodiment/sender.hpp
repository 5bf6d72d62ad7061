#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "tutor/embodiment/emotion.hpp"
#include "tutor/embodiment/osc.hpp"

namespace tutor::embodiment {

struct OscTarget {
    std::string host = "127.0.0.1";
    int port = 9000;
};

// "host:port"; throws ConfigError otherwise.
OscTarget parse_target(const std::string& text);

// Owns one UDP socket and one worker thread. Messages go out in enqueue
// order; expression commands schedule a zero-value reset after hold_ms.
// Send failures are logged and counted, never thrown.
class OscSender {
public:
    explicit OscSender(OscTarget target, std::size_t chatbox_chunk_chars = 144);
    ~OscSender();

    OscSender(const OscSender&) = delete;
    OscSender& operator=(const OscSender&) = delete;

    void send(OscMessage message);
    void send_expression(const std::vector<ExpressionCommand>& commands);
    // Throws PreconditionError on empty text.
    void send_chatbox(std::string_view text);

    // Blocks until everything enqueued so far (resets excluded) is sent.
    void flush();

    std::uint64_t sent() const;
    std::uint64_t failures() const;
    const OscTarget& target() const { return target_; }

private:
    struct Delayed {
        std::chrono::steady_clock::time_point due;
        std::uint64_t order;
        OscMessage message;
        bool operator>(const Delayed& o) const {
            return due != o.due ? due > o.due : order > o.order;
        }
    };

    void run();
    void transmit(const OscMessage& message);

    OscTarget target_;
    std::size_t chunk_chars_;
    int fd_ = -1;
    std::vector<std::uint8_t> addr_;  // sockaddr storage

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::deque<OscMessage> queue_;
    std::priority_queue<Delayed, std::vector<Delayed>, std::greater<>> delayed_;
    std::uint64_t delayed_order_ = 0;
    bool busy_ = false;
    bool stopping_ = false;
    std::uint64_t sent_ = 0;
    std::uint64_t failures_ = 0;
    std::thread worker_;
};

}  // namespace tutor::embodiment
