#include "tutor/embodiment/osc.hpp"

#include <bit>
#include <cstring>

#include "tutor/core/errors.hpp"

namespace tutor::embodiment {

namespace {

void put_padded_string(std::vector<std::uint8_t>& out, std::string_view s) {
    out.insert(out.end(), s.begin(), s.end());
    std::size_t pad = 4 - (s.size() % 4);  // at least one NUL
    out.insert(out.end(), pad, 0);
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string padded_string() {
        std::size_t end = pos_;
        while (end < bytes_.size() && bytes_[end] != 0) ++end;
        if (end >= bytes_.size()) throw EncodingError("OSC string is not NUL-terminated");
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), end - pos_);
        std::size_t next = pos_ + (s.size() / 4 + 1) * 4;
        if (next > bytes_.size()) throw EncodingError("OSC string padding runs past the end");
        for (std::size_t i = end; i < next; ++i) {
            if (bytes_[i] != 0) throw EncodingError("OSC string padding is not zero");
        }
        pos_ = next;
        return s;
    }

    std::uint32_t be32() {
        if (pos_ + 4 > bytes_.size()) throw EncodingError("OSC argument truncated");
        std::uint32_t v = (std::uint32_t{bytes_[pos_]} << 24) | (std::uint32_t{bytes_[pos_ + 1]} << 16) |
                          (std::uint32_t{bytes_[pos_ + 2]} << 8) | std::uint32_t{bytes_[pos_ + 3]};
        pos_ += 4;
        return v;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

bool is_valid_address(std::string_view address) {
    if (address.empty() || address.front() != '/') return false;
    for (unsigned char c : address) {
        if (c <= 0x20 || c >= 0x7F || c == '#') return false;
    }
    return true;
}

std::vector<std::uint8_t> encode_osc(const OscMessage& message) {
    if (!is_valid_address(message.address))
        throw EncodingError("invalid OSC address: " + message.address);

    std::string tags = ",";
    for (const auto& arg : message.args) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int32_t>) tags += 'i';
                else if constexpr (std::is_same_v<T, float>) tags += 'f';
                else if constexpr (std::is_same_v<T, std::string>) {
                    if (v.find('\0') != std::string::npos)
                        throw EncodingError("OSC string argument contains NUL");
                    tags += 's';
                } else tags += v ? 'T' : 'F';
            },
            arg);
    }

    std::vector<std::uint8_t> out;
    put_padded_string(out, message.address);
    put_padded_string(out, tags);
    for (const auto& arg : message.args) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int32_t>) put_be32(out, static_cast<std::uint32_t>(v));
                else if constexpr (std::is_same_v<T, float>) put_be32(out, std::bit_cast<std::uint32_t>(v));
                else if constexpr (std::is_same_v<T, std::string>) put_padded_string(out, v);
            },
            arg);
    }
    return out;
}

OscMessage decode_osc(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 4 != 0) throw EncodingError("OSC packet size is not a multiple of 4");
    if (!bytes.empty() && bytes[0] == '#') throw EncodingError("OSC bundles are not supported");

    Reader r(bytes);
    OscMessage msg;
    msg.address = r.padded_string();
    if (!is_valid_address(msg.address)) throw EncodingError("invalid OSC address: " + msg.address);
    auto tags = r.padded_string();
    if (tags.empty() || tags[0] != ',') throw EncodingError("OSC type tag string must start with ','");

    for (std::size_t i = 1; i < tags.size(); ++i) {
        switch (tags[i]) {
            case 'i': msg.args.emplace_back(static_cast<std::int32_t>(r.be32())); break;
            case 'f': msg.args.emplace_back(std::bit_cast<float>(r.be32())); break;
            case 's': msg.args.emplace_back(r.padded_string()); break;
            case 'T': msg.args.emplace_back(true); break;
            case 'F': msg.args.emplace_back(false); break;
            default: throw EncodingError(std::string("unsupported OSC type tag '") + tags[i] + "'");
        }
    }
    if (!r.done()) throw EncodingError("trailing bytes after OSC arguments");
    return msg;
}

}  // namespace tutor::embodiment
