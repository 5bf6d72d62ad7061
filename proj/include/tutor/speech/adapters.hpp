#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "tutor/speech/audio.hpp"

namespace tutor::speech {

class SttAdapter {
public:
    virtual ~SttAdapter() = default;
    // Throws SpeechError on backend failure.
    virtual std::string transcribe_segment(const AudioSegment& segment) = 0;
};

class TtsAdapter {
public:
    virtual ~TtsAdapter() = default;
    virtual AudioSegment synthesize_text(const std::string& text, const std::string& voice_id) = 0;
};

// Precondition checks, then delegation. PreconditionError on an empty
// segment or empty text.
std::string transcribe(const AudioSegment& segment, SttAdapter& backend);
AudioSegment synthesize(const std::string& text, const std::string& voice_id, TtsAdapter& backend);

// Transcripts looked up by segment source_id.
class StubStt final : public SttAdapter {
public:
    explicit StubStt(std::map<std::string, std::string> transcripts);
    // JSON object {"source_id": "transcript", ...}.
    static StubStt from_file(const std::filesystem::path& path);

    std::string transcribe_segment(const AudioSegment& segment) override;

private:
    std::map<std::string, std::string> transcripts_;
};

// Silence lasting 15 ms per character (code point) of input.
class StubTts final : public TtsAdapter {
public:
    static constexpr int kMsPerChar = 15;
    explicit StubTts(int sample_rate = 16000) : sample_rate_(sample_rate) {}

    AudioSegment synthesize_text(const std::string& text, const std::string& voice_id) override;

    const std::string& last_voice() const { return last_voice_; }

private:
    int sample_rate_;
    std::string last_voice_;
};

// POST <endpoint> multipart/form-data {file: WAV, model}; reply {"text": ...}.
class HttpStt final : public SttAdapter {
public:
    HttpStt(std::string endpoint_url, std::string model, std::string api_key = {}, double timeout_s = 30.0);
    std::string transcribe_segment(const AudioSegment& segment) override;

private:
    std::string url_, model_, api_key_;
    double timeout_s_;
};

// POST <endpoint> {"model", "input", "voice", "response_format": "wav"};
// reply body is a PCM16 mono WAV.
class HttpTts final : public TtsAdapter {
public:
    HttpTts(std::string endpoint_url, std::string model, std::string api_key = {}, double timeout_s = 30.0);
    AudioSegment synthesize_text(const std::string& text, const std::string& voice_id) override;

private:
    std::string url_, model_, api_key_;
    double timeout_s_;
};

// Where synthesized speech goes.
class AudioSink {
public:
    virtual ~AudioSink() = default;
    virtual void play(const AudioSegment& audio) = 0;
};

// Concatenates everything played into one WAV, rewritten on every play.
class WavFileSink final : public AudioSink {
public:
    explicit WavFileSink(std::filesystem::path path, int sample_rate = 16000);
    void play(const AudioSegment& audio) override;
    std::size_t total_samples() const;

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    AudioSegment all_;
};

}  // namespace tutor::speech
