#include "tutor/speech/pipeline.hpp"

#include <exception>

namespace tutor::speech {

Segmenter::Segmenter(EndpointConfig config, std::string source_name)
    : endpointer_(std::move(config)), source_name_(std::move(source_name)) {}

std::optional<Utterance> Segmenter::push(const AudioFrame& frame) {
    auto event = endpointer_.push(frame);

    std::optional<Utterance> out;
    if (event) {
        Utterance u{*event, {}};
        u.audio.sample_rate = frame.sample_rate;
        u.audio.source_id = source_name_ + "#" + std::to_string(++count_);
        for (const auto& f : buffer_) {
            if (f.timestamp_ms >= event->speech_start_ms && f.timestamp_ms < event->speech_end_ms)
                u.audio.samples.insert(u.audio.samples.end(), f.samples.begin(), f.samples.end());
        }
        out = std::move(u);
        buffer_.clear();
    }
    if (endpointer_.in_speech()) buffer_.push_back(frame);
    else buffer_.clear();
    return out;
}

void run_capture_pipeline(const std::vector<AudioFrame>& frames, const EndpointConfig& config,
                          const std::string& source_name,
                          const std::function<void(Utterance)>& on_utterance,
                          std::size_t queue_capacity) {
    BoundedQueue<AudioFrame> queue(queue_capacity);
    std::exception_ptr consumer_error;

    std::thread consumer([&] {
        try {
            Segmenter seg(config, source_name);
            while (auto frame = queue.pop()) {
                if (auto u = seg.push(*frame)) on_utterance(std::move(*u));
            }
        } catch (...) {
            consumer_error = std::current_exception();
            queue.close();
        }
    });

    for (const auto& f : frames) {
        if (!queue.push(f)) break;
    }
    queue.close();
    consumer.join();
    if (consumer_error) std::rethrow_exception(consumer_error);
}

}  // namespace tutor::speech
