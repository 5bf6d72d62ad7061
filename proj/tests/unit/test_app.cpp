#include <doctest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "support.hpp"
#include "tutor/app/config.hpp"
#include "tutor/app/csv.hpp"
#include "tutor/app/event_log.hpp"
#include "tutor/app/gateway.hpp"
#include "tutor/app/host.hpp"
#include "tutor/app/protocol.hpp"
#include "tutor/app/runtime.hpp"
#include "tutor/app/sessions.hpp"
#include "tutor/core/errors.hpp"
#include "tutor/core/transitions.hpp"
#include "tutor/speech/adapters.hpp"

using namespace tutor;
using namespace tutor::app;
using testing::Rng;

namespace {

// Runtime over a scripted backend and a stepping clock, logging into a
// fresh directory.
struct App {
    std::filesystem::path dir;
    std::unique_ptr<Runtime> rt;
};

App make_app(const std::string& tag, const std::filesystem::path& script, int cap = 8) {
    App a;
    a.dir = testing::temp_dir(tag);
    AppConfig c;
    c.session.log_dir = a.dir.string();
    c.session.max_turns_per_phase = cap;
    c.learner = LearnerProfile{"ana", "Ana", "Spanish", "Chilean"};
    RuntimeOptions opts;
    opts.script = script;
    opts.fixed_clock_start = testing::t0();
    a.rt = Runtime::create(c, opts);
    return a;
}

App make_app(const std::string& tag, const nlohmann::json& script, int cap = 8) {
    auto dir = testing::temp_dir(tag + "-script");
    testing::spit(dir / "script.json", script.dump());
    return make_app(tag, dir / "script.json", cap);
}

nlohmann::json generic_script(int n) {
    auto j = nlohmann::json::array();
    for (int i = 0; i < n; ++i) j.push_back({{"reply", "Sure, let's keep going."}});
    return j;
}

std::string random_text(Rng& rng) {
    static const std::vector<std::string> pieces = {"a", "b c", ",", "\"", "\n", "\r\n", "ñ", "日本", " ", "x,y",
                                                    "\"q\"", "end"};
    std::string s;
    int n = static_cast<int>(rng() % 8) + 1;
    for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    return s;
}

TurnRecord random_turn(Rng& rng, std::int64_t seq) {
    TurnRecord t;
    t.seq = seq;
    t.role = std::array{Role::Learner, Role::Agent, Role::System}[rng() % 3];
    t.text = random_text(rng);
    t.phase = kAllPhases[rng() % kAllPhases.size()];
    t.started_at = testing::t0() + std::chrono::milliseconds(rng() % 10'000'000);
    t.ended_at = t.started_at + std::chrono::milliseconds(rng() % 60'000);
    if (rng() % 2) t.response_latency_ms = static_cast<std::int64_t>(rng() % 5000);
    if (rng() % 2) t.emotion = kAllEmotions[rng() % kAllEmotions.size()];
    return t;
}

}  // namespace

// ---- CSV -----------------------------------------------------------------

TEST_CASE("csv round trip over random transcripts") {
    Rng rng(31);
    auto dir = testing::temp_dir("csv-prop");
    for (int i = 0; i < 200; ++i) {
        std::vector<TurnRecord> turns;
        int n = static_cast<int>(rng() % 12);
        for (int k = 0; k < n; ++k) turns.push_back(random_turn(rng, k + 1));
        auto path = dir / ("t" + std::to_string(i) + ".csv");
        write_csv("s,\"" + std::to_string(i), turns, path);
        auto back = read_csv(path);
        if (n > 0) CHECK(back.session_id == "s,\"" + std::to_string(i));
        REQUIRE(back.turns.size() == turns.size());
        for (std::size_t k = 0; k < turns.size(); ++k) CHECK(back.turns[k] == turns[k]);
    }
}

TEST_CASE("csv line counts and escaping") {
    auto dir = testing::temp_dir("csv-lines");
    std::vector<TurnRecord> two = {testing::turn(1, Role::Agent, "Hello, there"),
                                   testing::turn(2, Role::Learner, "Hi")};
    write_csv("s1", two, dir / "two.csv");
    auto text = testing::slurp(dir / "two.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.rfind(std::string(kCsvHeader) + "\r\n", 0) == 0);

    write_csv("s1", {}, dir / "empty.csv");
    CHECK(testing::slurp(dir / "empty.csv") == std::string(kCsvHeader) + "\r\n");
    CHECK(read_csv(dir / "empty.csv").turns.empty());

    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");

    auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n1,2,3\r\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});

    testing::spit(dir / "bad.csv", "not,the,header\r\n");
    CHECK_THROWS_AS(read_csv(dir / "bad.csv"), EncodingError);
}

// ---- config --------------------------------------------------------------

TEST_CASE("config parsing") {
    auto c = parse_config(R"(
[session]
max_turns_per_phase = 4
prompt_mode = "single"
voice_id = "nova"
log_dir = "out"
[llm]
model_id = "m"
max_retries = 2
[gateway]
port = 0
[learner]
id = "ana"
name = "Ana"
[memory]
path = "mem.jsonl"
recall = 2
)");
    CHECK(c.session.max_turns_per_phase == 4);
    CHECK(c.session.prompt_mode == PromptMode::Single);
    CHECK(c.session.voice_id == "nova");
    CHECK(c.llm.model_id == "m");
    CHECK(c.llm.max_retries == 2);
    CHECK(c.gateway.port == 0);
    CHECK(c.learner.learner_id == "ana");
    CHECK(c.learner.name == "Ana");
    CHECK(c.memory_path == std::filesystem::path("mem.jsonl"));
    CHECK(c.recall_k == 2);

    auto d = parse_config("");
    CHECK(d.session.max_turns_per_phase == 8);
    CHECK(d.session.silence_threshold_s == 2.0);
    CHECK_FALSE(d.memory_path);

    CHECK_THROWS_AS(parse_config("[sesion]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[session]\nmax_turns = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[session]\nmax_turns_per_phase = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[session]\nmax_turns_per_phase = \"x\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[session]\nprompt_mode = \"dual\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[gateway]\nport = 70000\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("this is not toml ="), ConfigError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/tutor.toml"), ConfigError);

    auto dir = testing::temp_dir("cfg");
    testing::spit(dir / "c.toml", "[session]\nvoice_id = \"echo\"\n");
    CHECK(load_config_file(dir / "c.toml").session.voice_id == "echo");
}

// ---- protocol ------------------------------------------------------------

TEST_CASE("envelopes and operator commands") {
    SessionEventEnvelope e{"s1", 3, EnvelopeKind::PhaseChanged, {{"from", "Introduction"}, {"to", "Assessment"}},
                           "2024-05-01T10:00:00.000Z"};
    auto j = to_json(e);
    CHECK(j["kind"] == "phase_changed");
    CHECK(envelope_from_json(j) == e);
    for (auto kind : {EnvelopeKind::PhaseChanged, EnvelopeKind::TurnAdded, EnvelopeKind::AssessmentSet,
                      EnvelopeKind::ScenarioSet, EnvelopeKind::FeedbackReady, EnvelopeKind::Error,
                      EnvelopeKind::Ended}) {
        CHECK(envelope_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(envelope_from_json(nlohmann::json::array()), EncodingError);
    CHECK_THROWS_AS(envelope_from_json({{"session_id", "s"}, {"seq", 1}, {"kind", "bogus"}}), EncodingError);

    auto f = operator_command_from_json({{"type", "force_transition"}, {"phase", "Ended"}});
    REQUIRE(std::holds_alternative<ForceTransition>(f));
    CHECK(std::get<ForceTransition>(f).target == TaskPhase::Ended);
    CHECK(std::holds_alternative<EndSessionCommand>(operator_command_from_json({{"type", "end_session"}})));
    auto say = operator_command_from_json({{"type", "say_as_learner"}, {"text", "hello"}});
    CHECK(std::get<SayAsLearner>(say).text == "hello");
    auto inject = operator_command_from_json(
        {{"type", "inject_scenario"},
         {"scenario", {{"title", "Ordering coffee"}, {"agent_role", "barista"}, {"learner_role", "customer"},
                       {"environment", "cafe"}, {"scene_description", "A quiet cafe at noon."},
                       {"goal", "order a drink"}}}});
    CHECK(std::get<InjectScenario>(inject).scenario.title == "Ordering coffee");
    for (const auto& cmd : {f, say, inject}) {
        CHECK(to_json(operator_command_from_json(to_json(cmd))) == to_json(cmd));
    }

    CHECK_THROWS_AS(operator_command_from_json({{"type", "force_transition"}, {"phase", "Nowhere"}}), EncodingError);
    CHECK_THROWS_AS(operator_command_from_json({{"type", "say_as_learner"}}), EncodingError);
    CHECK_THROWS_AS(operator_command_from_json({{"type", "reboot"}}), EncodingError);
    CHECK_THROWS_AS(operator_command_from_json("end_session"), EncodingError);
}

// ---- event log -----------------------------------------------------------

TEST_CASE("event log subscription has no gaps under a concurrent emitter") {
    SteppingClock clock(testing::t0(), std::chrono::milliseconds(1));
    EventLog log("s", clock);
    constexpr int kTotal = 4000;
    std::thread emitter([&] {
        for (int i = 0; i < kTotal; ++i) log.emit(EnvelopeKind::TurnAdded, {{"i", i}});
    });
    std::vector<std::vector<std::int64_t>> seen(8);
    std::vector<int> ids;
    std::mutex m;
    for (std::size_t k = 0; k < seen.size(); ++k) {
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        auto [snapshot, id] = log.subscribe([&, k](const SessionEventEnvelope& e) {
            std::lock_guard lock(m);
            seen[k].push_back(e.seq);
        });
        std::lock_guard lock(m);
        std::vector<std::int64_t> head;
        for (const auto& e : snapshot) head.push_back(e.seq);
        seen[k].insert(seen[k].begin(), head.begin(), head.end());
        ids.push_back(id);
    }
    emitter.join();
    for (const auto& s : seen) {
        REQUIRE(s.size() == static_cast<std::size_t>(kTotal));
        for (int i = 0; i < kTotal; ++i) CHECK(s[i] == i + 1);
    }

    auto [tail, id] = log.subscribe([](const SessionEventEnvelope&) {}, kTotal - 2);
    CHECK(tail.size() == 3);
    log.unsubscribe(id);
    for (int i : ids) log.unsubscribe(i);
    log.emit(EnvelopeKind::Ended, {});
    CHECK(log.history().size() == static_cast<std::size_t>(kTotal + 1));
}

// ---- host ----------------------------------------------------------------

TEST_CASE("text session: CSV rows and envelopes agree on the full flow") {
    auto a = make_app("host-flow", testing::fixture("full_flow/script.json"));
    std::vector<SessionEventEnvelope> envs;
    std::ostringstream out;
    {
        SessionHost host(*a.rt, "flow", a.rt->config.learner);
        host.events().subscribe([&](const SessionEventEnvelope& e) { envs.push_back(e); });
        std::ifstream in(testing::fixture("full_flow/learner.txt"));
        CHECK(run_text_session(host, in, out) == 0);
    }
    auto csv = read_csv(a.dir / "flow.csv");
    CHECK(csv.session_id == "flow");

    std::vector<TurnRecord> from_events;
    std::vector<std::pair<std::string, std::string>> changes;
    for (std::size_t i = 0; i < envs.size(); ++i) {
        CHECK(envs[i].seq == static_cast<std::int64_t>(i + 1));
        if (envs[i].kind == EnvelopeKind::TurnAdded) {
            const auto& p = envs[i].payload;
            CHECK(p["seq"].get<std::int64_t>() == static_cast<std::int64_t>(from_events.size() + 1));
            auto& t = from_events.emplace_back();
            t.seq = p["seq"];
            t.text = p["text"];
            t.phase = *phase_from_string(p["phase"].get<std::string>());
        }
        if (envs[i].kind == EnvelopeKind::PhaseChanged) {
            changes.emplace_back(envs[i].payload["from"], envs[i].payload["to"]);
        }
    }
    REQUIRE(from_events.size() == csv.turns.size());
    for (std::size_t i = 0; i < csv.turns.size(); ++i) {
        CHECK(csv.turns[i].seq == from_events[i].seq);
        CHECK(csv.turns[i].text == from_events[i].text);
        CHECK(csv.turns[i].phase == from_events[i].phase);
    }
    for (const auto& [from, to] : changes) {
        CHECK(validate_transition(*phase_from_string(from), *phase_from_string(to)));
    }
    REQUIRE_FALSE(envs.empty());
    CHECK(envs.back().kind == EnvelopeKind::Ended);

    std::set<TaskPhase> phases;
    for (const auto& t : csv.turns) phases.insert(t.phase);
    for (auto p : {TaskPhase::Introduction, TaskPhase::Assessment, TaskPhase::ScenarioSelection,
                   TaskPhase::RolePlay, TaskPhase::Ended}) {
        CHECK(phases.count(p) == 1);
    }
    CHECK(std::count(changes.begin(), changes.end(), std::make_pair(std::string("RolePlay"), std::string("Feedback"))) ==
          1);

    auto meta = nlohmann::json::parse(testing::slurp(a.dir / "flow.meta.json"));
    CHECK(meta["session_id"] == "flow");
    CHECK(meta["assessed_level"] == "B1");
    CHECK(meta["turns"] == csv.turns.size());

    std::ostringstream replay;
    CHECK(replay_csv(a.dir / "flow.csv", replay) == 0);
    CHECK(replay.str().find("Transcript is consistent.") != std::string::npos);
}

TEST_CASE("replay flags a tampered transcript") {
    auto a = make_app("replay", testing::fixture("full_flow/script.json"));
    {
        SessionHost host(*a.rt, "r", a.rt->config.learner);
        std::ifstream in(testing::fixture("full_flow/learner.txt"));
        std::ostringstream out;
        run_text_session(host, in, out);
    }
    auto turns = read_csv(a.dir / "r.csv").turns;
    REQUIRE(turns.size() > 4);

    auto gap = turns;
    gap.erase(gap.begin() + 2);
    write_csv("r", gap, a.dir / "gap.csv");
    std::ostringstream o1;
    CHECK(replay_csv(a.dir / "gap.csv", o1) != 0);

    auto jump = turns;
    for (auto& t : jump) {
        if (t.phase == TaskPhase::Introduction) t.phase = TaskPhase::RolePlay;
    }
    write_csv("r", jump, a.dir / "jump.csv");
    std::ostringstream o2;
    CHECK(replay_csv(a.dir / "jump.csv", o2) != 0);
    CHECK(o2.str().find("phase jump") != std::string::npos);
}

TEST_CASE("text commands /switch and /end") {
    auto a = make_app("cmds", testing::fixture("full_flow/script.json"));
    std::istringstream in(
        "Hi! My name is Ana and I'm from Chile.\n"
        "I want to learn English because I would like to work abroad as a civil engineer one day.\n"
        "Last summer I travelled with my sister to the south of Chile. We took a long bus ride to Puerto Varas and "
        "stayed in a small wooden house near the lake. Every morning we walked along the shore, drank coffee and "
        "watched the volcano. One day it rained the whole afternoon, so we played cards with the owner of the house, "
        "and he told us funny stories about his childhood. I was happy because we laughed a lot.\n"
        "The first one, please.\n"
        "/bogus\n"
        "/switch\n"
        "/switch\n"
        "/end\n"
        "never read\n");
    std::ostringstream out;
    SessionHost host(*a.rt, "c", a.rt->config.learner);
    CHECK(run_text_session(host, in, out) == 0);
    auto s = out.str();
    CHECK(s.find("=== RolePlay ===") != std::string::npos);
    CHECK(s.find("Unknown command.") != std::string::npos);
    CHECK(s.find("=== ScenarioSelection ===", s.find("=== RolePlay ===")) != std::string::npos);
    CHECK(s.find("Not possible in ScenarioSelection") != std::string::npos);
    CHECK(s.find("=== Ended ===") != std::string::npos);
    CHECK(s.find("never read") == std::string::npos);
    CHECK(host.ended());
    // A switch skips feedback.
    for (const auto& t : host.state().short_term) CHECK(t.phase != TaskPhase::Feedback);
}

TEST_CASE("a backend failure keeps the learner turn and the session resumes") {
    nlohmann::json script = nlohmann::json::array(
        {{{"reply", "Hello! What's your name?"}},
         {{"match", "zebra"}, {"reply", "NO"}},
         {{"match", "zebra"}, {"reply", "A zebra, how fun! Tell me more."}}});
    auto a = make_app("fail", script);
    std::istringstream in("I like horses.\nI like zebra stripes.\n/end\n");
    std::ostringstream out;
    SessionHost host(*a.rt, "f", a.rt->config.learner);
    CHECK(run_text_session(host, in, out) == 0);
    CHECK(out.str().find("[backend unavailable]") != std::string::npos);
    CHECK(out.str().find("A zebra, how fun!") != std::string::npos);
    auto turns = read_csv(a.dir / "f.csv").turns;
    std::vector<std::string> texts;
    for (const auto& t : turns) texts.push_back(t.text);
    REQUIRE(texts.size() == 5);
    CHECK(texts[1] == "I like horses.");
    CHECK(texts[2] == "I like zebra stripes.");
    CHECK(turns[3].role == Role::Agent);
    CHECK(turns[4].role == Role::System);
}

// ---- voice ---------------------------------------------------------------

namespace {

speech::AudioSegment two_utterances() {
    speech::AudioSegment a;
    auto silence = [&](int ms) { a.samples.insert(a.samples.end(), static_cast<std::size_t>(ms) * 16, 0); };
    auto tone = [&](int ms) {
        for (int i = 0; i < ms * 16; ++i) {
            a.samples.push_back(static_cast<std::int16_t>(8000 * std::sin(2 * M_PI * 440.0 * i / 16000.0)));
        }
    };
    silence(500);
    tone(1200);
    silence(2500);
    tone(900);
    silence(2500);
    return a;
}

struct CountingSink final : speech::AudioSink {
    int plays = 0;
    std::size_t samples = 0;
    void play(const speech::AudioSegment& a) override {
        ++plays;
        samples += a.samples.size();
    }
};

struct BrokenTts final : speech::TtsAdapter {
    speech::AudioSegment synthesize_text(const std::string&, const std::string&) override {
        throw SpeechError("synthesis service down");
    }
};

}  // namespace

TEST_CASE("voice session turns two utterances into two complete turns") {
    auto a = make_app("voice", testing::fixture("full_flow/script.json"));
    auto wav = a.dir / "in.wav";
    speech::write_wav(wav, two_utterances());
    speech::StubStt stt(std::map<std::string, std::string>{
        {"in.wav#1", "Hi! My name is Ana and I'm from Chile."},
        {"in.wav#2", "I want to learn English because I would like to work abroad as a civil engineer one day."}});
    speech::StubTts tts;
    CountingSink sink;
    std::ostringstream out;
    SessionHost host(*a.rt, "v", a.rt->config.learner);
    VoiceIo io{wav, stt, tts, sink};
    io.voice_id = "nova";
    CHECK(run_voice_session(host, io, out) == 0);

    auto turns = read_csv(a.dir / "v.csv").turns;
    int learner = 0, agent = 0;
    for (const auto& t : turns) {
        learner += t.role == Role::Learner;
        agent += t.role == Role::Agent;
    }
    CHECK(learner == 2);
    CHECK(agent == 3);  // greeting plus two replies
    CHECK(sink.plays == 3);
    CHECK(tts.last_voice() == "nova");
    CHECK(out.str().find("You: Hi! My name is Ana") != std::string::npos);

    VoiceIo missing{a.dir / "absent.wav", stt, tts, sink};
    SessionHost other(*a.rt, "v2", a.rt->config.learner);
    CHECK_THROWS_AS(run_voice_session(other, missing, out), ConfigError);
}

TEST_CASE("voice session falls back to text when synthesis fails") {
    auto a = make_app("voice-tts", testing::fixture("full_flow/script.json"));
    auto wav = a.dir / "in.wav";
    speech::write_wav(wav, two_utterances());
    speech::StubStt stt(std::map<std::string, std::string>{{"in.wav#1", "Hi! My name is Ana and I'm from Chile."},
                                                           {"in.wav#2", "I work as an engineer."}});
    BrokenTts tts;
    CountingSink sink;
    std::ostringstream out;
    SessionHost host(*a.rt, "vt", a.rt->config.learner);
    CHECK(run_voice_session(host, VoiceIo{wav, stt, tts, sink}, out) == 0);
    CHECK(sink.plays == 0);
    CHECK(out.str().find("[text only]") != std::string::npos);
    CHECK(out.str().find("Tutor: ") != std::string::npos);
    int learner = 0;
    for (const auto& t : read_csv(a.dir / "vt.csv").turns) learner += t.role == Role::Learner;
    CHECK(learner == 2);
}

// ---- gateway -------------------------------------------------------------

namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;

struct WsClient {
    net::io_context ioc;
    websocket::stream<net::ip::tcp::socket> ws{ioc};

    explicit WsClient(int port) {
        net::ip::tcp::resolver resolver(ioc);
        net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws.handshake("127.0.0.1", "/");
    }
    ~WsClient() {
        beast::error_code ec;
        ws.close(websocket::close_code::normal, ec);
    }

    void send(const std::string& text) { ws.write(net::buffer(text)); }
    void send(const nlohmann::json& j) { send(j.dump()); }
    nlohmann::json read() {
        beast::flat_buffer buf;
        ws.read(buf);
        return nlohmann::json::parse(beast::buffers_to_string(buf.data()));
    }
    // Next frame that is not an ack.
    nlohmann::json read_envelope() {
        for (;;) {
            auto j = read();
            if (j.value("type", "") != "ack") return j;
        }
    }
};

}  // namespace

TEST_CASE("gateway: snapshot then live tail, operator commands, rejections") {
    auto a = make_app("gw", generic_script(60));
    GatewayConfig gc;
    gc.port = 0;
    Gateway gw(*a.rt, gc);
    int port = gw.start();
    REQUIRE(port > 0);

    auto host = gw.create_session("g1", a.rt->config.learner);
    host->learner_text("Hello, I am Ana.");
    auto before = host->events().history().size();
    REQUIRE(before >= 3);

    WsClient c1(port), c2(port);
    c1.send({{"type", "subscribe"}, {"session_id", "g1"}});
    c2.send({{"type", "subscribe"}, {"session_id", "g1"}});
    std::int64_t expect1 = 1;
    for (std::size_t i = 0; i < before; ++i) {
        auto e = c1.read_envelope();
        CHECK(e["seq"] == expect1++);
    }
    std::int64_t expect2 = 1;
    for (std::size_t i = 0; i < before; ++i) CHECK(c2.read_envelope()["seq"] == expect2++);

    // Live turns while subscribed.
    std::thread speaker([&] {
        for (int i = 0; i < 3; ++i) host->learner_text("More about me, number " + std::to_string(i) + ".");
    });
    speaker.join();
    auto after = host->events().history().size();
    for (auto n = before; n < after; ++n) {
        auto e = c1.read_envelope();
        CHECK(e["seq"] == expect1++);
    }
    for (auto n = before; n < after; ++n) CHECK(c2.read_envelope()["seq"] == expect2++);

    // Malformed frame: the error goes to its sender only.
    c1.send(std::string("{not json"));
    auto err = c1.read_envelope();
    CHECK(err["kind"] == "error");
    CHECK(err["seq"] == 0);
    host->say_agent("Still here.");
    auto next2 = c2.read_envelope();
    CHECK(next2["kind"] == "turn_added");
    CHECK(next2["seq"] == expect2++);
    CHECK(c1.read_envelope()["seq"] == expect1++);

    // Unknown session.
    c2.send({{"type", "subscribe"}, {"session_id", "nope"}});
    auto unknown = c2.read_envelope();
    CHECK(unknown["seq"] == 0);
    CHECK(unknown["payload"]["reason"].get<std::string>().find("unknown session") != std::string::npos);

    // Walk into RolePlay, then ask for an illegal edge.
    host->force(TaskPhase::Assessment);
    host->force(TaskPhase::ScenarioSelection);
    host->force(TaskPhase::RolePlay);
    REQUIRE(host->state().phase == TaskPhase::RolePlay);
    auto now = host->events().history().size();
    for (auto n = static_cast<std::size_t>(expect1 - 1); n < now; ++n) c1.read_envelope();
    expect1 = static_cast<std::int64_t>(now) + 1;
    c1.send({{"type", "force_transition"}, {"session_id", "g1"}, {"phase", "Assessment"}});
    auto rej = c1.read_envelope();
    CHECK(rej["kind"] == "error");
    CHECK(rej["seq"] == 0);
    CHECK(rej["payload"]["from"] == "RolePlay");
    CHECK(rej["payload"]["to"] == "Assessment");
    CHECK(host->state().phase == TaskPhase::RolePlay);

    c1.send({{"type", "list_sessions"}});
    auto list = c1.read_envelope();
    CHECK(list["type"] == "sessions");
    CHECK(list["sessions"][0]["phase"] == "RolePlay");

    // Forced end reaches every subscriber.
    c1.send({{"type", "force_transition"}, {"session_id", "g1"}, {"phase", "Ended"}});
    bool ended = false;
    for (int i = 0; i < 10 && !ended; ++i) {
        auto e = c1.read_envelope();
        CHECK(e["seq"] == expect1++);
        ended = e["kind"] == "ended";
    }
    CHECK(ended);
    ended = false;
    for (int i = 0; i < 40 && !ended; ++i) ended = c2.read_envelope()["kind"] == "ended";
    CHECK(ended);
    CHECK(host->ended());
    CHECK(std::filesystem::exists(a.dir / "g1.csv"));
    gw.stop();
}

TEST_CASE("gateway: create_session over the socket") {
    auto a = make_app("gw-create", generic_script(5));
    GatewayConfig gc;
    gc.port = 0;
    Gateway gw(*a.rt, gc);
    int port = gw.start();
    WsClient c(port);
    c.send({{"type", "create_session"}, {"session_id", "fresh"}, {"learner", {{"id", "bo"}}}});
    auto ack = c.read();
    CHECK(ack["type"] == "ack");
    CHECK(ack["session_id"] == "fresh");
    c.send({{"type", "subscribe"}, {"session_id", "fresh"}});
    auto first = c.read_envelope();
    CHECK(first["seq"] == 1);
    CHECK(gw.find("fresh") != nullptr);
    c.send({{"type", "frobnicate"}, {"session_id", "fresh"}});
    CHECK(c.read_envelope()["kind"] == "error");
    gw.stop();
}
