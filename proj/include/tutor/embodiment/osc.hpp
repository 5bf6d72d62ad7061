#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tutor::embodiment {

// OSC 1.0 argument. bool encodes as the payload-free T / F type tags.
using OscArg = std::variant<std::int32_t, float, std::string, bool>;

struct OscMessage {
    std::string address;
    std::vector<OscArg> args;

    bool operator==(const OscMessage&) const = default;
};

// Address must start with '/' and contain only printable ASCII other than
// space and '#'.
bool is_valid_address(std::string_view address);

// Layout: address NUL-padded to 4 bytes, ",<tags>" NUL-padded to 4 bytes,
// then big-endian int32/float32 payloads and padded strings. Throws
// EncodingError on an invalid address or a string containing NUL.
std::vector<std::uint8_t> encode_osc(const OscMessage& message);

// Inverse of encode_osc; throws EncodingError on malformed input.
OscMessage decode_osc(std::span<const std::uint8_t> bytes);

}  // namespace tutor::embodiment
