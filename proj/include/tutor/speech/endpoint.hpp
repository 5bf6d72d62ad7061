#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tutor/speech/audio.hpp"

namespace tutor::speech {

using ActivityDetector = std::function<bool(const AudioFrame&)>;

struct EndpointConfig {
    double silence_threshold_s = 2.0;
    double energy_threshold_db = -35.0;
    // When set, replaces the energy gate.
    ActivityDetector external_detector;
    int min_speech_ms = 200;
};

void validate(const EndpointConfig& config);

struct TurnBoundaryEvent {
    std::int64_t speech_start_ms = 0;
    std::int64_t speech_end_ms = 0;
    std::int64_t total_speech_ms = 0;  // active frames only, pauses excluded
    std::int64_t emitted_at_ms = 0;    // speech_end_ms + silence threshold

    bool operator==(const TurnBoundaryEvent&) const = default;
};

// Streaming endpointer. A segment opens at the first active frame and closes
// once inactivity has lasted silence_threshold_s past the end of its last
// active frame; segments spanning less than min_speech_ms are dropped. Gaps
// between frame timestamps count as silence.
class Endpointer {
public:
    explicit Endpointer(EndpointConfig config);

    // Throws StreamError when timestamps go backwards or the frame duration
    // changes mid-stream.
    std::optional<TurnBoundaryEvent> push(const AudioFrame& frame);

    bool in_speech() const { return in_speech_; }

private:
    bool is_active(const AudioFrame& frame) const;

    EndpointConfig config_;
    std::int64_t threshold_ms_;
    std::optional<std::int64_t> last_ts_;
    std::optional<int> frame_ms_;
    bool in_speech_ = false;
    std::int64_t start_ms_ = 0;
    std::int64_t end_ms_ = 0;
    std::int64_t speech_ms_ = 0;
};

std::vector<TurnBoundaryEvent> detect_endpoint(std::span<const AudioFrame> frames,
                                               const EndpointConfig& config);

}  // namespace tutor::speech
