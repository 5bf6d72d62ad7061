#include "tutor/speech/endpoint.hpp"

#include <cmath>

#include "tutor/core/errors.hpp"

namespace tutor::speech {

void validate(const EndpointConfig& config) {
    if (!(config.silence_threshold_s > 0.0)) throw ConfigError("silence_threshold_s must be positive");
    if (config.min_speech_ms <= 0) throw ConfigError("min_speech_ms must be positive");
}

Endpointer::Endpointer(EndpointConfig config)
    : config_(std::move(config)),
      threshold_ms_(static_cast<std::int64_t>(std::llround(config_.silence_threshold_s * 1000.0))) {
    validate(config_);
}

bool Endpointer::is_active(const AudioFrame& frame) const {
    if (config_.external_detector) return config_.external_detector(frame);
    return frame_dbfs(frame) >= config_.energy_threshold_db;
}

std::optional<TurnBoundaryEvent> Endpointer::push(const AudioFrame& frame) {
    if (last_ts_ && frame.timestamp_ms < *last_ts_) throw StreamError("audio frame timestamps went backwards");
    if (frame_ms_ && frame.frame_duration_ms != *frame_ms_)
        throw StreamError("frame duration changed mid-stream");
    if (frame.frame_duration_ms <= 0) throw StreamError("frame duration must be positive");
    last_ts_ = frame.timestamp_ms;
    frame_ms_ = frame.frame_duration_ms;

    auto frame_end = frame.timestamp_ms + frame.frame_duration_ms;
    if (is_active(frame)) {
        std::optional<TurnBoundaryEvent> closed;
        if (in_speech_ && frame.timestamp_ms - end_ms_ >= threshold_ms_) {
            // The timestamp gap alone was a long enough silence.
            in_speech_ = false;
            if (end_ms_ - start_ms_ >= config_.min_speech_ms)
                closed = TurnBoundaryEvent{start_ms_, end_ms_, speech_ms_, end_ms_ + threshold_ms_};
        }
        if (!in_speech_) {
            in_speech_ = true;
            start_ms_ = frame.timestamp_ms;
            speech_ms_ = 0;
        }
        end_ms_ = frame_end;
        speech_ms_ += frame.frame_duration_ms;
        return closed;
    }

    if (!in_speech_ || frame_end - end_ms_ < threshold_ms_) return std::nullopt;

    in_speech_ = false;
    if (end_ms_ - start_ms_ < config_.min_speech_ms) return std::nullopt;
    return TurnBoundaryEvent{start_ms_, end_ms_, speech_ms_, end_ms_ + threshold_ms_};
}

std::vector<TurnBoundaryEvent> detect_endpoint(std::span<const AudioFrame> frames,
                                               const EndpointConfig& config) {
    Endpointer ep(config);
    std::vector<TurnBoundaryEvent> out;
    for (const auto& f : frames) {
        if (auto e = ep.push(f)) out.push_back(*e);
    }
    return out;
}

}  // namespace tutor::speech
