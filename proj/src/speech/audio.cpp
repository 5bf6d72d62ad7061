#include "tutor/speech/audio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "tutor/core/errors.hpp"

namespace tutor::speech {

namespace {

std::uint32_t le32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}
std::uint16_t le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

AudioSegment decode_wav(const std::vector<std::uint8_t>& b) {
    if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0)
        throw SpeechError("not a RIFF/WAVE file");
    AudioSegment seg;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= b.size()) {
        auto size = le32(b.data() + pos + 4);
        const auto* body = b.data() + pos + 8;
        if (pos + 8 + size > b.size()) throw SpeechError("WAV chunk runs past end of file");
        if (std::memcmp(b.data() + pos, "fmt ", 4) == 0) {
            if (size < 16) throw SpeechError("WAV fmt chunk too short");
            if (le16(body) != 1) throw SpeechError("WAV must be PCM");
            if (le16(body + 2) != 1) throw SpeechError("WAV must be mono");
            seg.sample_rate = static_cast<int>(le32(body + 4));
            if (le16(body + 14) != 16) throw SpeechError("WAV must be 16-bit");
            have_fmt = true;
        } else if (std::memcmp(b.data() + pos, "data", 4) == 0) {
            if (!have_fmt) throw SpeechError("WAV data chunk before fmt chunk");
            seg.samples.resize(size / 2);
            for (std::size_t i = 0; i < seg.samples.size(); ++i)
                seg.samples[i] = static_cast<std::int16_t>(le16(body + 2 * i));
            return seg;
        }
        pos += 8 + size + (size & 1);
    }
    throw SpeechError("WAV has no data chunk");
}

AudioSegment read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpeechError("cannot open WAV file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto seg = decode_wav(bytes);
    seg.source_id = path.filename().string();
    return seg;
}

std::vector<std::uint8_t> encode_wav(const AudioSegment& seg) {
    std::vector<std::uint8_t> out;
    auto data_bytes = static_cast<std::uint32_t>(seg.samples.size() * 2);
    put_tag(out, "RIFF");
    put_le32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_le32(out, 16);
    put_le16(out, 1);
    put_le16(out, 1);
    put_le32(out, static_cast<std::uint32_t>(seg.sample_rate));
    put_le32(out, static_cast<std::uint32_t>(seg.sample_rate * 2));
    put_le16(out, 2);
    put_le16(out, 16);
    put_tag(out, "data");
    put_le32(out, data_bytes);
    for (auto s : seg.samples) put_le16(out, static_cast<std::uint16_t>(s));
    return out;
}

void write_wav(const std::filesystem::path& path, const AudioSegment& segment) {
    auto bytes = encode_wav(segment);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpeechError("cannot write WAV file " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<AudioFrame> frame_audio(const AudioSegment& audio, int frame_duration_ms) {
    if (frame_duration_ms <= 0) throw PreconditionError("frame duration must be positive");
    auto per_frame = static_cast<std::size_t>(audio.sample_rate) * static_cast<std::size_t>(frame_duration_ms) / 1000;
    if (per_frame == 0) throw PreconditionError("frame shorter than one sample");
    std::vector<AudioFrame> frames;
    for (std::size_t off = 0, i = 0; off < audio.samples.size(); off += per_frame, ++i) {
        AudioFrame f;
        f.sample_rate = audio.sample_rate;
        f.frame_duration_ms = frame_duration_ms;
        f.timestamp_ms = static_cast<std::int64_t>(i) * frame_duration_ms;
        auto end = std::min(audio.samples.size(), off + per_frame);
        f.samples.assign(audio.samples.begin() + static_cast<std::ptrdiff_t>(off),
                         audio.samples.begin() + static_cast<std::ptrdiff_t>(end));
        f.samples.resize(per_frame, 0);
        frames.push_back(std::move(f));
    }
    return frames;
}

double frame_dbfs(const AudioFrame& frame) {
    if (frame.samples.empty()) return -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (auto s : frame.samples) sum += static_cast<double>(s) * static_cast<double>(s);
    double rms = std::sqrt(sum / static_cast<double>(frame.samples.size()));
    if (rms == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(rms / 32768.0);
}

}  // namespace tutor::speech
