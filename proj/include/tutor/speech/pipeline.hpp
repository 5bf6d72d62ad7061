#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "tutor/speech/endpoint.hpp"

namespace tutor::speech {

// Ordered, bounded, blocking queue. push blocks while full; pop returns
// nullopt once the queue is closed and drained.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    // False when the queue was closed.
    bool push(T value) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
        if (closed_) return false;
        items_.push_back(std::move(value));
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
        if (items_.empty()) return std::nullopt;
        T v = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return v;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::size_t capacity_;
    std::mutex mutex_;
    std::condition_variable not_empty_, not_full_;
    std::deque<T> items_;
    bool closed_ = false;
};

struct Utterance {
    TurnBoundaryEvent boundary;
    AudioSegment audio;  // frames from speech start to speech end
};

// Endpointer plus a rolling buffer so each boundary comes with its audio.
class Segmenter {
public:
    explicit Segmenter(EndpointConfig config, std::string source_name = "stream");

    std::optional<Utterance> push(const AudioFrame& frame);

private:
    Endpointer endpointer_;
    std::string source_name_;
    std::deque<AudioFrame> buffer_;
    int count_ = 0;
};

// Runs `frames` through a producer thread, a bounded queue and a consumer
// thread running the segmenter; `on_utterance` is called on the consumer
// thread in capture order. Returns when the stream is exhausted.
void run_capture_pipeline(const std::vector<AudioFrame>& frames, const EndpointConfig& config,
                          const std::string& source_name,
                          const std::function<void(Utterance)>& on_utterance,
                          std::size_t queue_capacity = 16);

}  // namespace tutor::speech
