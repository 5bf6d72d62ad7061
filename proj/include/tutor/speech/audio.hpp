#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tutor::speech {

struct AudioFrame {
    std::vector<std::int16_t> samples;  // PCM16 mono
    int sample_rate = 16000;
    int frame_duration_ms = 20;
    std::int64_t timestamp_ms = 0;  // stream-relative start
};

// A contiguous stretch of audio, e.g. one endpointed utterance.
struct AudioSegment {
    std::vector<std::int16_t> samples;
    int sample_rate = 16000;
    std::string source_id;  // fixture name or "<file>#<n>" for stream segments
};

// PCM16 mono RIFF/WAVE. Throws SpeechError on anything else.
AudioSegment read_wav(const std::filesystem::path& path);
AudioSegment decode_wav(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_wav(const AudioSegment& segment);
void write_wav(const std::filesystem::path& path, const AudioSegment& segment);

// Cuts a segment into fixed-duration frames with consecutive timestamps; a
// trailing partial frame is zero-padded.
std::vector<AudioFrame> frame_audio(const AudioSegment& audio, int frame_duration_ms = 20);

// Frame RMS level in dBFS; -inf for digital silence.
double frame_dbfs(const AudioFrame& frame);

}  // namespace tutor::speech
