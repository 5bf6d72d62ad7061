#include <doctest.h>

#include <atomic>
#include <nlohmann/json.hpp>

#include "stub_server.hpp"
#include "support.hpp"
#include "tutor/core/errors.hpp"
#include "tutor/llm/http_backend.hpp"
#include "tutor/llm/scripted_backend.hpp"

using namespace tutor;
using namespace tutor::llm;

namespace {

const std::vector<ChatMessage> kHello = {{ChatRole::System, "be nice"}, {ChatRole::User, "hello"}};

std::string completion_json(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST_CASE("decision parsing: last token wins") {
    struct Case {
        const char* text;
        std::optional<bool> want;
    };
    const Case cases[] = {
        {"YES", true},
        {"NO", false},
        {"No, not yet. Actually\xe2\x80\x94NO", false},
        {"perhaps", std::nullopt},
        {"The user has shared enough. YES.", true},
        {"yes", true},
        {"Yes, but wait... no", false},
        {"NOTHING to add, YESTERDAY", std::nullopt},
        {"no no no YES", true},
        {"Answer: **NO**", false},
    };
    for (const auto& c : cases) {
        CAPTURE(c.text);
        CHECK(parse_decision(c.text) == c.want);
    }
    for (auto s : {"yes", "Yes", "yEs", "YES"}) CHECK(parse_decision(s) == true);
    for (auto s : {"no", "No", "nO", "NO"}) CHECK(parse_decision(s) == false);
}

TEST_CASE("scripted backend") {
    ScriptedBackend b({{std::nullopt, "Hello!"}});
    CHECK(b.complete(kHello).text == "Hello!");
    CHECK(b.remaining() == 0);
    CHECK_THROWS_AS(b.complete(kHello), BackendUnavailable);
    CHECK_THROWS_AS(b.complete({}), PreconditionError);
    std::vector<ChatMessage> no_system = {{ChatRole::User, "x"}};
    CHECK_THROWS_AS(b.complete(no_system), PreconditionError);
    CHECK(b.calls().size() == 2);
}

TEST_CASE("scripted backend matching") {
    auto b = ScriptedBackend::from_json(R"([{"match":"weather","reply":"sunny"},{"reply":"plain"}])");
    CHECK(b.complete(kHello).text == "plain");
    std::vector<ChatMessage> weather = {{ChatRole::System, "s"}, {ChatRole::User, "how is the weather"}};
    CHECK(b.complete(weather).text == "sunny");
    CHECK_THROWS_AS(ScriptedBackend::parse_script("{}"), ConfigError);
    CHECK_THROWS_AS(ScriptedBackend::parse_script("[{\"match\":\"x\"}]"), ConfigError);
}

TEST_CASE("scripted backend is deterministic") {
    auto script = ScriptedBackend::parse_script(R"([{"reply":"a"},{"reply":"b"},{"reply":"c"}])");
    ScriptedBackend x(script), y(script);
    for (int i = 0; i < 3; ++i) CHECK(x.complete(kHello).text == y.complete(kHello).text);
}

TEST_CASE("wire format") {
    auto body = nlohmann::json::parse(build_request_body("gpt-4", kHello, 0.0));
    CHECK(body["model"] == "gpt-4");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["messages"][1] == nlohmann::json{{"role", "user"}, {"content", "hello"}});
    CHECK(parse_response_body(completion_json("hi")).text == "hi");
    try {
        parse_response_body(R"({"choices":[]})");
        FAIL("expected throw");
    } catch (const BackendProtocolError& e) {
        CHECK(e.raw_payload() == R"({"choices":[]})");
    }
    CHECK_THROWS_AS(parse_response_body("not json"), BackendProtocolError);
}

TEST_CASE("endpoint parsing and config") {
    auto e = parse_endpoint("http://127.0.0.1:8080/v1/chat");
    CHECK(e.scheme == "http");
    CHECK(e.port == 8080);
    CHECK(e.path == "/v1/chat");
    CHECK(parse_endpoint("https://api.example.com/x").port == 443);
    CHECK_THROWS_AS(parse_endpoint("ftp://x/y"), ConfigError);
    BackendConfig bad;
    bad.max_retries = -1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("http backend against a local stub") {
    testing::StubServer stub;
    std::atomic<int> flaky_hits{0}, bad_hits{0};
    std::string seen_auth;
    nlohmann::json seen_body;
    stub.server.Post("/ok", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = nlohmann::json::parse(req.body);
        res.set_content(completion_json("stub says hi"), "application/json");
    });
    stub.server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (++flaky_hits < 3) {
            res.status = flaky_hits == 1 ? 429 : 503;
            return;
        }
        res.set_content(completion_json("finally"), "application/json");
    });
    stub.server.Post("/down", [&](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    stub.server.Post("/bad", [&](const httplib::Request&, httplib::Response& res) {
        ++bad_hits;
        res.status = 400;
    });
    stub.server.Post("/garbage", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html>", "text/html");
    });
    stub.start();

    std::vector<std::chrono::milliseconds> waits;
    auto make = [&](const std::string& path, int retries) {
        BackendConfig c;
        c.endpoint_url = stub.url(path);
        c.max_retries = retries;
        c.backoff_base_ms = 100;
        c.timeout_s = 5;
        return HttpBackend(c, std::string("sekrit"), [&](std::chrono::milliseconds d) { waits.push_back(d); });
    };

    auto ok = make("/ok", 2);
    CHECK(ok.complete(kHello, {0.0}).text == "stub says hi");
    CHECK(seen_auth == "Bearer sekrit");
    CHECK(seen_body["model"] == "gpt-4");
    CHECK(seen_body["messages"].size() == 2);
    CHECK(ok.last_attempts() == 1);

    auto flaky = make("/flaky", 2);
    CHECK(flaky.complete(kHello).text == "finally");
    CHECK(flaky.last_attempts() == 3);
    CHECK(waits == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(100), std::chrono::milliseconds(200)});

    for (int retries : {0, 1, 3}) {
        waits.clear();
        auto down = make("/down", retries);
        CHECK_THROWS_AS(down.complete(kHello), BackendUnavailable);
        CHECK(down.last_attempts() == retries + 1);
        long total = 0;
        for (auto w : waits) total += w.count();
        CHECK(total <= 100L * ((1L << retries) - 1));
    }

    auto bad = make("/bad", 3);
    CHECK_THROWS_AS(bad.complete(kHello), BackendUnavailable);
    CHECK(bad_hits == 1);

    auto garbage = make("/garbage", 2);
    CHECK_THROWS_AS(garbage.complete(kHello), BackendProtocolError);

    BackendConfig closed;
    closed.endpoint_url = "http://127.0.0.1:1/v1";
    closed.max_retries = 1;
    closed.timeout_s = 1;
    HttpBackend refused(closed, std::nullopt, [](std::chrono::milliseconds) {});
    CHECK_THROWS_AS(refused.complete(kHello), BackendUnavailable);
    CHECK(refused.last_attempts() == 2);
}
