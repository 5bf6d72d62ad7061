#include "tutor/speech/adapters.hpp"

#include <httplib.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <regex>
#include <sstream>

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"

namespace tutor::speech {

namespace {

struct Url {
    std::string base;  // scheme://host:port
    std::string path;
};

Url split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw ConfigError("bad speech endpoint URL: " + url);
    return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

httplib::Client make_client(const Url& url, double timeout_s) {
    httplib::Client client(url.base);
    auto secs = static_cast<time_t>(timeout_s);
    auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    return client;
}

}  // namespace

std::string transcribe(const AudioSegment& segment, SttAdapter& backend) {
    if (segment.samples.empty()) throw PreconditionError("cannot transcribe an empty segment");
    return backend.transcribe_segment(segment);
}

AudioSegment synthesize(const std::string& text, const std::string& voice_id, TtsAdapter& backend) {
    if (text.empty()) throw PreconditionError("cannot synthesize empty text");
    return backend.synthesize_text(text, voice_id);
}

StubStt::StubStt(std::map<std::string, std::string> transcripts) : transcripts_(std::move(transcripts)) {}

StubStt StubStt::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open transcript map " + path.string());
    std::map<std::string, std::string> m;
    try {
        auto doc = nlohmann::json::parse(in);
        for (auto it = doc.begin(); it != doc.end(); ++it) m.emplace(it.key(), it.value().get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad transcript map " + path.string() + ": " + e.what());
    }
    return StubStt(std::move(m));
}

std::string StubStt::transcribe_segment(const AudioSegment& segment) {
    auto it = transcripts_.find(segment.source_id);
    if (it == transcripts_.end()) throw SpeechError("stub STT has no transcript for " + segment.source_id);
    return it->second;
}

AudioSegment StubTts::synthesize_text(const std::string& text, const std::string& voice_id) {
    last_voice_ = voice_id;
    AudioSegment out;
    out.sample_rate = sample_rate_;
    auto chars = static_cast<std::int64_t>(text::utf8_length(text));
    out.samples.assign(static_cast<std::size_t>(chars * kMsPerChar * sample_rate_ / 1000), 0);
    out.source_id = "tts:" + voice_id;
    return out;
}

HttpStt::HttpStt(std::string endpoint_url, std::string model, std::string api_key, double timeout_s)
    : url_(std::move(endpoint_url)), model_(std::move(model)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {
    split_url(url_);
}

std::string HttpStt::transcribe_segment(const AudioSegment& segment) {
    auto url = split_url(url_);
    auto client = make_client(url, timeout_s_);
    auto wav = encode_wav(segment);
    httplib::MultipartFormDataItems items = {
        {"file", std::string(wav.begin(), wav.end()), "audio.wav", "audio/wav"},
        {"model", model_, "", ""},
    };
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(url.path, headers, items);
    if (!res) throw SpeechError("transcription request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw SpeechError("transcription endpoint returned HTTP " + std::to_string(res->status));
    try {
        return nlohmann::json::parse(res->body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw SpeechError("transcription response lacks a text field: " + res->body);
    }
}

HttpTts::HttpTts(std::string endpoint_url, std::string model, std::string api_key, double timeout_s)
    : url_(std::move(endpoint_url)), model_(std::move(model)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {
    split_url(url_);
}

AudioSegment HttpTts::synthesize_text(const std::string& text, const std::string& voice_id) {
    auto url = split_url(url_);
    auto client = make_client(url, timeout_s_);
    nlohmann::json body = {{"model", model_}, {"input", text}, {"voice", voice_id}, {"response_format", "wav"}};
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) throw SpeechError("synthesis request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw SpeechError("synthesis endpoint returned HTTP " + std::to_string(res->status));
    auto seg = decode_wav(std::vector<std::uint8_t>(res->body.begin(), res->body.end()));
    seg.source_id = "tts:" + voice_id;
    return seg;
}

WavFileSink::WavFileSink(std::filesystem::path path, int sample_rate) : path_(std::move(path)) {
    all_.sample_rate = sample_rate;
}

void WavFileSink::play(const AudioSegment& audio) {
    std::lock_guard lock(mutex_);
    if (audio.sample_rate != all_.sample_rate)
        throw SpeechError("sink sample rate mismatch");
    all_.samples.insert(all_.samples.end(), audio.samples.begin(), audio.samples.end());
    write_wav(path_, all_);
}

std::size_t WavFileSink::total_samples() const {
    std::lock_guard lock(mutex_);
    return all_.samples.size();
}

}  // namespace tutor::speech
