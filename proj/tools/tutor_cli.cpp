#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>

#include "tutor/app/config.hpp"
#include "tutor/app/gateway.hpp"
#include "tutor/app/host.hpp"
#include "tutor/app/runtime.hpp"
#include "tutor/app/sessions.hpp"
#include "tutor/core/errors.hpp"
#include "tutor/embodiment/sender.hpp"
#include "tutor/speech/adapters.hpp"

using namespace tutor;

namespace {

struct GlobalFlags {
    std::string config;
    std::string prompt_mode;
    std::string scripted;
    std::string osc;
    std::string log_dir;
    std::string data_dir;
    std::string memory;
    std::string fixed_clock;
    int max_turns = 0;
    bool verbose = false;
};

struct LearnerFlags {
    std::string id, name, native_language, background, motivation;
};

app::AppConfig resolve_config(const GlobalFlags& f) {
    std::optional<std::filesystem::path> path;
    if (!f.config.empty()) path = f.config;
    else path = app::config_path_from_env();
    app::AppConfig c = path ? app::load_config_file(*path) : app::AppConfig{};

    if (!f.prompt_mode.empty()) {
        auto m = prompt_mode_from_string(f.prompt_mode);
        if (!m) throw ConfigError("--prompt-mode must be single or multi");
        c.session.prompt_mode = *m;
    }
    if (!f.osc.empty()) c.session.osc_target = f.osc;
    if (!f.log_dir.empty()) c.session.log_dir = f.log_dir;
    if (!f.data_dir.empty()) c.data_dir = f.data_dir;
    if (!f.memory.empty()) c.memory_path = f.memory;
    if (f.max_turns > 0) c.session.max_turns_per_phase = f.max_turns;
    app::validate(c);
    return c;
}

void apply_learner(LearnerProfile& p, const LearnerFlags& f) {
    if (!f.id.empty()) p.learner_id = f.id;
    if (!f.name.empty()) p.name = f.name;
    if (!f.native_language.empty()) p.native_language = f.native_language;
    if (!f.background.empty()) p.cultural_background = f.background;
    if (!f.motivation.empty()) p.motivation = f.motivation;
}

std::unique_ptr<app::Runtime> make_runtime(const GlobalFlags& f, const app::AppConfig& c) {
    app::RuntimeOptions opts;
    if (!f.scripted.empty()) opts.script = f.scripted;
    if (!f.fixed_clock.empty()) opts.fixed_clock_start = parse_iso8601(f.fixed_clock);
    return app::Runtime::create(c, opts);
}

std::string default_session_id() {
    auto iso = format_iso8601(std::chrono::system_clock::now());
    std::string id = "session-";
    for (char ch : iso.substr(0, 19)) {
        if (std::isdigit(static_cast<unsigned char>(ch))) id += ch;
        else if (ch == 'T') id += '-';
    }
    return id;
}

std::unique_ptr<embodiment::OscSender> make_osc(const app::AppConfig& c) {
    if (c.session.osc_target == "off") return nullptr;
    return std::make_unique<embodiment::OscSender>(embodiment::parse_target(c.session.osc_target));
}

std::string env_or_empty(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    return v ? v : "";
}

app::Gateway* g_gateway = nullptr;

void on_signal(int) {
    if (g_gateway) std::thread([] { g_gateway->stop(); }).detach();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Spoken-English tutoring engine: text, voice, transcript replay and console gateway."};
    cli.require_subcommand(1);

    GlobalFlags g;
    cli.add_option("--config", g.config, "TOML config file (default: $ELLMA_CONFIG)");
    cli.add_option("--prompt-mode", g.prompt_mode, "single or multi")->check(CLI::IsMember({"single", "multi"}));
    cli.add_option("--scripted", g.scripted, "Scripted model replies (JSON) instead of a live endpoint")
        ->check(CLI::ExistingFile);
    cli.add_option("--osc", g.osc, "Avatar OSC target host:port, or off");
    cli.add_option("--log-dir", g.log_dir, "Directory for <session_id>.csv transcripts");
    cli.add_option("--data-dir", g.data_dir, "Directory overriding the built-in prompt and table files");
    cli.add_option("--memory", g.memory, "JSON-lines file for long-term session summaries");
    cli.add_option("--fixed-clock", g.fixed_clock, "Deterministic clock start (ISO-8601, 250 ms per read)");
    cli.add_option("--max-turns", g.max_turns, "Learner turns allowed per phase");
    cli.add_flag("-v,--verbose", g.verbose, "Debug logging");

    LearnerFlags learner;
    std::string session_id;
    auto add_session_flags = [&](CLI::App* sub) {
        sub->add_option("--session-id", session_id, "Session identifier (default: timestamp)");
        sub->add_option("--learner-id", learner.id, "Learner identifier");
        sub->add_option("--name", learner.name, "Learner name");
        sub->add_option("--native-language", learner.native_language, "Learner's native language");
        sub->add_option("--background", learner.background, "Learner's cultural background");
        sub->add_option("--motivation", learner.motivation, "Why the learner studies English");
    };

    auto* text = cli.add_subcommand("text", "Interactive text session");
    std::string text_input;
    text->add_option("--input", text_input, "Read learner lines from a file instead of stdin")->check(CLI::ExistingFile);
    add_session_flags(text);

    auto* voice = cli.add_subcommand("voice", "Voice session from a WAV capture");
    std::string wav_input, stt_fixture, tts_out;
    voice->add_option("--input", wav_input, "PCM16 mono WAV capture")->required();
    voice->add_option("--stt-fixture", stt_fixture, "JSON map of segment id to transcript (offline STT)");
    voice->add_option("--tts-out", tts_out, "WAV file receiving synthesized speech");
    add_session_flags(voice);

    auto* replay = cli.add_subcommand("replay", "Print and check a CSV transcript");
    std::string replay_path;
    replay->add_option("csv", replay_path, "Transcript file")->required()->check(CLI::ExistingFile);

    auto* serve = cli.add_subcommand("serve", "WebSocket gateway for the browser console");
    std::string host_override;
    int port_override = -1;
    serve->add_option("--host", host_override, "Listen address");
    serve->add_option("--port", port_override, "Listen port (default 8787)");
    add_session_flags(serve);

    CLI11_PARSE(cli, argc, argv);
    spdlog::set_level(g.verbose ? spdlog::level::debug : spdlog::level::warn);

    try {
        if (replay->parsed()) return app::replay_csv(replay_path, std::cout);

        auto config = resolve_config(g);
        apply_learner(config.learner, learner);
        auto rt = make_runtime(g, config);
        if (session_id.empty()) session_id = default_session_id();

        if (text->parsed()) {
            app::SessionHost host(*rt, session_id, config.learner);
            if (text_input.empty()) return app::run_text_session(host, std::cin, std::cout);
            std::ifstream in(text_input);
            return app::run_text_session(host, in, std::cout);
        }

        if (voice->parsed()) {
            std::unique_ptr<speech::SttAdapter> stt;
            if (!stt_fixture.empty()) stt = std::make_unique<speech::StubStt>(speech::StubStt::from_file(stt_fixture));
            else if (!config.speech.stt_endpoint.empty())
                stt = std::make_unique<speech::HttpStt>(config.speech.stt_endpoint, config.speech.stt_model,
                                                        env_or_empty(config.llm.api_key_env));
            else throw ConfigError("voice needs --stt-fixture or speech.stt_endpoint in the config");

            std::unique_ptr<speech::TtsAdapter> tts;
            if (!config.speech.tts_endpoint.empty())
                tts = std::make_unique<speech::HttpTts>(config.speech.tts_endpoint, config.speech.tts_model,
                                                        env_or_empty(config.llm.api_key_env));
            else tts = std::make_unique<speech::StubTts>();

            if (tts_out.empty()) tts_out = (std::filesystem::path(config.session.log_dir) / (session_id + ".tts.wav")).string();
            std::filesystem::create_directories(std::filesystem::path(tts_out).parent_path().empty()
                                                    ? std::filesystem::path(".")
                                                    : std::filesystem::path(tts_out).parent_path());
            speech::WavFileSink sink(tts_out);
            auto osc = make_osc(config);

            speech::EndpointConfig ep;
            ep.silence_threshold_s = config.session.silence_threshold_s;
            app::VoiceIo io{wav_input, *stt, *tts, sink, osc.get(), &rt->expressions, ep, config.session.voice_id};
            app::SessionHost host(*rt, session_id, config.learner);
            return app::run_voice_session(host, io, std::cout);
        }

        if (serve->parsed()) {
            auto gw_config = config.gateway;
            if (!host_override.empty()) gw_config.host = host_override;
            if (port_override >= 0) gw_config.port = port_override;
            app::Gateway gateway(*rt, gw_config);
            gateway.create_session(session_id, config.learner);
            int port = gateway.start();
            std::cout << "Console gateway on ws://" << gw_config.host << ":" << port << " (session " << session_id
                      << "); Ctrl-C to stop\n"
                      << std::flush;
            g_gateway = &gateway;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            gateway.wait();
            g_gateway = nullptr;
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
