#include "tutor/embodiment/sender.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <cstring>

#include "tutor/core/errors.hpp"

namespace tutor::embodiment {

OscTarget parse_target(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw ConfigError("OSC target must be host:port, got '" + text + "'");
    OscTarget t;
    t.host = text.substr(0, colon);
    try {
        std::size_t used = 0;
        t.port = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ConfigError("OSC target port is not a number: '" + text + "'");
    }
    if (t.port <= 0 || t.port > 65535) throw ConfigError("OSC target port out of range: " + text);
    return t;
}

OscSender::OscSender(OscTarget target, std::size_t chatbox_chunk_chars)
    : target_(std::move(target)), chunk_chars_(chatbox_chunk_chars) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    auto port = std::to_string(target_.port);
    if (int rc = ::getaddrinfo(target_.host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw ConfigError("cannot resolve OSC target " + target_.host + ": " + gai_strerror(rc));
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0) {
        ::freeaddrinfo(res);
        throw Error(std::string("cannot open UDP socket: ") + std::strerror(errno));
    }
    auto* p = reinterpret_cast<const std::uint8_t*>(res->ai_addr);
    addr_.assign(p, p + res->ai_addrlen);
    ::freeaddrinfo(res);
    worker_ = std::thread([this] { run(); });
}

OscSender::~OscSender() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    worker_.join();
    if (fd_ >= 0) ::close(fd_);
}

void OscSender::send(OscMessage message) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(message));
    }
    cv_.notify_all();
}

void OscSender::send_expression(const std::vector<ExpressionCommand>& commands) {
    auto now = std::chrono::steady_clock::now();
    {
        std::lock_guard lock(mutex_);
        for (const auto& c : commands) {
            queue_.push_back(to_osc(c));
            delayed_.push({now + std::chrono::milliseconds(c.hold_ms), delayed_order_++, to_osc_reset(c)});
        }
    }
    cv_.notify_all();
}

void OscSender::send_chatbox(std::string_view text) {
    auto messages = chatbox_messages(text, chunk_chars_);
    {
        std::lock_guard lock(mutex_);
        for (auto& m : messages) queue_.push_back(std::move(m));
    }
    cv_.notify_all();
}

void OscSender::flush() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

std::uint64_t OscSender::sent() const {
    std::lock_guard lock(mutex_);
    return sent_;
}

std::uint64_t OscSender::failures() const {
    std::lock_guard lock(mutex_);
    return failures_;
}

void OscSender::transmit(const OscMessage& message) {
    auto bytes = encode_osc(message);
    auto n = ::sendto(fd_, bytes.data(), bytes.size(), 0,
                      reinterpret_cast<const sockaddr*>(addr_.data()),
                      static_cast<socklen_t>(addr_.size()));
    std::lock_guard lock(mutex_);
    if (n == static_cast<ssize_t>(bytes.size())) {
        ++sent_;
    } else {
        ++failures_;
        spdlog::warn("OSC send to {}:{} failed: {}", target_.host, target_.port, std::strerror(errno));
    }
}

void OscSender::run() {
    std::unique_lock lock(mutex_);
    for (;;) {
        if (!queue_.empty()) {
            auto msg = std::move(queue_.front());
            queue_.pop_front();
            busy_ = true;
            lock.unlock();
            try {
                transmit(msg);
            } catch (const std::exception& e) {
                spdlog::warn("OSC message dropped: {}", e.what());
            }
            lock.lock();
            busy_ = false;
            if (queue_.empty()) idle_cv_.notify_all();
            continue;
        }
        if (stopping_) {
            // Release any held expression before the socket goes away.
            while (!delayed_.empty()) {
                auto msg = delayed_.top().message;
                delayed_.pop();
                lock.unlock();
                transmit(msg);
                lock.lock();
            }
            return;
        }
        if (!delayed_.empty()) {
            auto due = delayed_.top().due;
            if (std::chrono::steady_clock::now() >= due) {
                queue_.push_back(delayed_.top().message);
                delayed_.pop();
                continue;
            }
            cv_.wait_until(lock, due);
        } else {
            cv_.wait(lock);
        }
    }
}

}  // namespace tutor::embodiment
