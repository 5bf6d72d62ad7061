#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <bit>
#include <cstring>

#include "support.hpp"
#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"
#include "tutor/embodiment/emotion.hpp"
#include "tutor/embodiment/osc.hpp"
#include "tutor/embodiment/sender.hpp"

using namespace tutor;
using namespace tutor::embodiment;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string hex(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : bytes) {
        s += digits[b >> 4];
        s += digits[b & 15];
    }
    return s;
}

OscArg parse_arg(const std::string& item) {
    auto type = item.substr(0, 1);
    auto value = item.substr(2);
    if (type == "i") return static_cast<std::int32_t>(std::stol(value));
    if (type == "f") return std::bit_cast<float>(static_cast<std::uint32_t>(std::stoul(value, nullptr, 16)));
    if (type == "b") return value == "1";
    return value;
}

struct Vector {
    OscMessage message;
    std::string expected_hex;
};

std::vector<Vector> load_vectors() {
    std::vector<Vector> out;
    for (const auto& line : text::split_lines(testing::slurp(testing::golden("osc_vectors.txt")))) {
        if (line.empty() || line[0] == '#') continue;
        auto parts = split(line, '|');
        REQUIRE(parts.size() == 3);
        OscMessage m{parts[0], {}};
        if (!parts[1].empty())
            for (const auto& a : split(parts[1], ';')) m.args.push_back(parse_arg(a));
        out.push_back({m, parts[2]});
    }
    return out;
}

OscMessage random_message(testing::Rng& rng) {
    const std::string addr_chars = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789/_-.";
    OscMessage m;
    m.address = "/";
    std::size_t len = rng() % 30;
    for (std::size_t i = 0; i < len; ++i) m.address += addr_chars[rng() % addr_chars.size()];
    std::size_t nargs = rng() % 6;
    for (std::size_t i = 0; i < nargs; ++i) {
        switch (rng() % 4) {
            case 0: m.args.emplace_back(static_cast<std::int32_t>(static_cast<std::uint32_t>(rng()))); break;
            case 1: {
                float f;
                do f = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
                while (f != f);  // NaN never compares equal
                m.args.emplace_back(f);
                break;
            }
            case 2: {
                std::string s;
                std::size_t n = rng() % 12;
                for (std::size_t k = 0; k < n; ++k) s += static_cast<char>(1 + rng() % 255);
                m.args.emplace_back(s);
                break;
            }
            default: m.args.emplace_back(rng() % 2 == 0); break;
        }
    }
    return m;
}

// UDP socket bound to an ephemeral loopback port.
struct UdpListener {
    int fd = -1;
    int port = 0;
    UdpListener() {
        fd = ::socket(AF_INET, SOCK_DGRAM, 0);
        sockaddr_in a{};
        a.sin_family = AF_INET;
        a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        ::bind(fd, reinterpret_cast<sockaddr*>(&a), sizeof a);
        socklen_t n = sizeof a;
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&a), &n);
        port = ntohs(a.sin_port);
        timeval tv{2, 0};
        ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    }
    ~UdpListener() { ::close(fd); }
    std::optional<OscMessage> receive() {
        std::uint8_t buf[2048];
        auto n = ::recv(fd, buf, sizeof buf, 0);
        if (n <= 0) return std::nullopt;
        return decode_osc(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
    }
};

}  // namespace

TEST_CASE("osc encoder matches hand-encoded vectors") {
    auto vectors = load_vectors();
    REQUIRE(vectors.size() >= 10);
    for (const auto& v : vectors) {
        CAPTURE(v.message.address);
        auto bytes = encode_osc(v.message);
        CHECK(hex(bytes) == v.expected_hex);
        CHECK(bytes.size() % 4 == 0);
        CHECK(decode_osc(bytes) == v.message);
    }
}

TEST_CASE("osc spot checks") {
    CHECK(hex(encode_osc({"/a", {std::int32_t{1}}})) == "2f6100002c69000000000001");
    auto joy = encode_osc({"/avatar/parameters/Joy", {1.0f}});
    // 22-char address + NUL padded to 24, ",f" padded to 4, one float.
    auto pad4 = [](std::size_t n) { return (n + 3) / 4 * 4; };
    CHECK(joy.size() == pad4(22 + 1) + pad4(2 + 1) + 4);
    CHECK(hex(joy).substr(hex(joy).size() - 8) == "3f800000");
}

TEST_CASE("osc decode inverts encode on random messages") {
    testing::Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        auto m = random_message(rng);
        auto bytes = encode_osc(m);
        REQUIRE(bytes.size() % 4 == 0);
        REQUIRE(decode_osc(bytes) == m);
    }
}

TEST_CASE("osc rejects bad input") {
    CHECK_THROWS_AS(encode_osc({"noslash", {}}), EncodingError);
    CHECK_THROWS_AS(encode_osc({"/has space", {}}), EncodingError);
    CHECK_THROWS_AS(encode_osc({"/x", {std::string("a\0b", 3)}}), EncodingError);
    std::vector<std::uint8_t> truncated = {0x2f, 0x61, 0, 0, 0x2c, 0x69, 0, 0, 0, 0};
    CHECK_THROWS_AS(decode_osc(truncated), EncodingError);
    std::vector<std::uint8_t> unaligned = {0x2f, 0x61, 0};
    CHECK_THROWS_AS(decode_osc(unaligned), EncodingError);
    std::vector<std::uint8_t> bad_tag = {0x2f, 0x61, 0, 0, 0x2c, 0x7a, 0, 0};
    CHECK_THROWS_AS(decode_osc(bad_tag), EncodingError);
}

TEST_CASE("emotion detection") {
    Lexicon joy{{"happy", EmotionLabel::Joy}};
    CHECK(detect_emotion("I am so happy today!", joy) == EmotionLabel::Joy);
    CHECK(detect_emotion("", joy) == EmotionLabel::Neutral);
    Lexicon two{{"sad", EmotionLabel::Sadness}, {"happy", EmotionLabel::Joy}};
    CHECK(detect_emotion("sad but happy, happy", two) == EmotionLabel::Joy);
    CHECK(detect_emotion("happy then sad", two) == EmotionLabel::Joy);
    CHECK(detect_emotion("sad then happy", two) == EmotionLabel::Sadness);
    CHECK(detect_emotion("unhappy", joy) == EmotionLabel::Neutral);
    auto lex = load_lexicon(testing::env().res.read("lexicon.toml"));
    CHECK(detect_emotion("I don't understand this", lex) == EmotionLabel::Confusion);
    CHECK_THROWS_AS(load_lexicon("[keywords]\nfoo = \"angst\"\n"), ConfigError);
}

TEST_CASE("emotion detection is total and deterministic") {
    auto lex = load_lexicon(testing::env().res.read("lexicon.toml"));
    testing::Rng rng(3);
    std::vector<std::string> vocab;
    for (const auto& [k, v] : lex) vocab.push_back(k);
    vocab.insert(vocab.end(), {"the", "a", "coffee", "please", ",", "!"});
    for (int i = 0; i < 1000; ++i) {
        std::string s;
        for (std::size_t k = rng() % 10; k > 0; --k) s += vocab[rng() % vocab.size()] + " ";
        CHECK(detect_emotion(s, lex) == detect_emotion(s, lex));
    }
}

TEST_CASE("expression table") {
    auto table = ExpressionTable::from_toml(testing::env().res.read("expressions.toml"));
    CHECK(map_expression(EmotionLabel::Neutral, table).empty());
    auto joy = map_expression(EmotionLabel::Joy, table);
    REQUIRE(joy.size() == 1);
    CHECK(joy[0] == ExpressionCommand{"Joy", 1.0f, 1500});
    for (auto e : kAllEmotions)
        for (const auto& c : map_expression(e, table))
            CHECK(to_osc(c).address.rfind(kAvatarParameterPrefix, 0) == 0);
    CHECK(to_osc_reset(joy[0]) == OscMessage{"/avatar/parameters/Joy", {0.0f}});
    std::string partial =
        "[expressions]\njoy = []\nsadness = []\nsurprise = []\nfrustration = []\nneutral = []\n";
    CHECK_THROWS_AS(ExpressionTable::from_toml(partial), ConfigError);
}

TEST_CASE("chatbox chunks") {
    auto one = chatbox_messages("hi");
    REQUIRE(one.size() == 1);
    CHECK(one[0] == OscMessage{"/chatbox/input", {std::string("hi"), true}});
    auto many = chatbox_messages(std::string(300, 'x'), 144);
    CHECK(many.size() == (300 + 143) / 144);
    CHECK_THROWS_AS(chatbox_messages(""), PreconditionError);
}

TEST_CASE("udp sender delivers in order with resets") {
    UdpListener listener;
    OscSender sender({"127.0.0.1", listener.port}, 144);
    sender.send_chatbox(std::string(300, 'y'));
    std::vector<OscMessage> got;
    for (int i = 0; i < 3; ++i) {
        auto m = listener.receive();
        REQUIRE(m);
        got.push_back(*m);
    }
    CHECK(std::get<std::string>(got[0].args[0]).size() == 144);
    CHECK(std::get<std::string>(got[2].args[0]).size() == 12);

    sender.send_expression({{"Joy", 1.0f, 50}});
    auto set = listener.receive();
    auto reset = listener.receive();
    REQUIRE(set);
    REQUIRE(reset);
    CHECK(*set == OscMessage{"/avatar/parameters/Joy", {1.0f}});
    CHECK(*reset == OscMessage{"/avatar/parameters/Joy", {0.0f}});
    sender.flush();
    CHECK(sender.failures() == 0);
    CHECK(sender.sent() >= 5);
    CHECK_THROWS_AS(sender.send_chatbox(""), PreconditionError);
}

TEST_CASE("osc target parsing") {
    auto t = parse_target("127.0.0.1:9000");
    CHECK(t.host == "127.0.0.1");
    CHECK(t.port == 9000);
    CHECK_THROWS_AS(parse_target("nohost"), ConfigError);
    CHECK_THROWS_AS(parse_target("h:0"), ConfigError);
}
