#include "tutor/app/sessions.hpp"

#include <spdlog/spdlog.h>

#include <iostream>

#include "tutor/core/text.hpp"
#include "tutor/core/transitions.hpp"
#include "tutor/speech/pipeline.hpp"

namespace tutor::app {

namespace {

const char* kHelp =
    "Commands: /end (finish), /switch (leave the role-play), /scenarios (new suggestions), "
    "/scenario <description> (practice your own situation)";

void print_reply(std::ostream& out, TaskPhase& shown, const SessionHost& host, const HostReply& reply) {
    auto phase = host.state().phase;
    if (reply.error) {
        out << "[backend unavailable] " << *reply.error << "\n"
            << "Your message was kept; send it again or try later.\n";
    }
    if (phase != shown) {
        out << "=== " << to_string(phase) << " ===\n";
        shown = phase;
    }
    if (!reply.agent_text.empty()) out << "Tutor: " << reply.agent_text << "\n";
}

}  // namespace

int run_text_session(SessionHost& host, std::istream& in, std::ostream& out) {
    TaskPhase shown = host.state().phase;
    out << "=== " << to_string(shown) << " ===\n";
    print_reply(out, shown, host, host.start());

    std::string line;
    while (!host.ended() && std::getline(in, line)) {
        auto input = text::trim(line);
        if (input.empty()) continue;
        out << "You: " << input << "\n";
        try {
            HostReply reply;
            if (input == "/end") {
                host.end();
            } else if (input == "/switch") {
                reply = host.switch_role_play();
            } else if (input == "/scenarios") {
                reply = host.request_scenarios();
            } else if (input.rfind("/scenario", 0) == 0 && (input.size() == 9 || input[9] == ' ')) {
                reply = host.practice(text::trim(std::string_view(input).substr(9)));
            } else if (input == "/help") {
                out << kHelp << "\n";
                continue;
            } else if (input.front() == '/') {
                out << "Unknown command. " << kHelp << "\n";
                continue;
            } else {
                reply = host.learner_text(input);
            }
            print_reply(out, shown, host, reply);
        } catch (const ProtocolError& e) {
            out << "Not possible in " << to_string(e.from()) << ": " << e.what() << "\n";
        } catch (const PreconditionError& e) {
            out << e.what() << "\n";
        }
    }
    host.end();
    if (shown != TaskPhase::Ended) out << "=== Ended ===\n";
    out << "Transcript: " << host.csv_path().string() << "\n";
    if (host.csv().error()) {
        out << "Transcript log failed: " << *host.csv().error() << "\n";
        return 1;
    }
    return 0;
}

namespace {

void deliver(SessionHost& host, const VoiceIo& io, std::ostream& out, const std::string& agent_text) {
    if (agent_text.empty()) return;
    out << "Tutor: " << agent_text << "\n";
    if (io.osc) {
        auto turns = host.state().short_term;
        if (io.expressions && !turns.empty() && turns.back().emotion) {
            io.osc->send_expression(embodiment::map_expression(*turns.back().emotion, *io.expressions));
        }
        io.osc->send_chatbox(agent_text);
    }
    try {
        io.sink.play(speech::synthesize(agent_text, io.voice_id, io.tts));
    } catch (const SpeechError& e) {
        spdlog::warn("speech synthesis failed, text only: {}", e.what());
        out << "[text only] speech synthesis unavailable\n";
    }
}

}  // namespace

int run_voice_session(SessionHost& host, const VoiceIo& io, std::ostream& out) {
    if (!std::filesystem::exists(io.input_wav)) {
        throw ConfigError("no audio source: " + io.input_wav.string() +
                          " does not exist (pass a PCM16 mono WAV with --input)");
    }
    speech::AudioSegment audio;
    try {
        audio = speech::read_wav(io.input_wav);
    } catch (const SpeechError& e) {
        throw ConfigError("no usable audio source: " + std::string(e.what()));
    }
    auto frames = speech::frame_audio(audio);

    auto greeting = host.start();
    deliver(host, io, out, greeting.agent_text);

    speech::run_capture_pipeline(frames, io.endpoint, io.input_wav.filename().string(), [&](speech::Utterance u) {
        if (host.ended()) return;
        std::string heard;
        try {
            heard = text::trim(speech::transcribe(u.audio, io.stt));
        } catch (const SpeechError& e) {
            spdlog::warn("transcription failed: {}", e.what());
        }
        try {
            if (heard.empty()) {
                deliver(host, io, out,
                        host.say_agent("Sorry, I didn't quite catch that. Could you say it again?").agent_text);
                return;
            }
            out << "You: " << heard << "\n";
            workflow::TurnInput input{heard};
            input.speech_seconds = static_cast<double>(u.boundary.total_speech_ms) / 1000.0;
            auto reply = host.learner_turn(input);
            if (reply.error) out << "[backend unavailable] " << *reply.error << "\n";
            deliver(host, io, out, reply.agent_text);
        } catch (const PreconditionError& e) {
            spdlog::warn("utterance dropped: {}", e.what());
        }
    });
    if (io.osc) io.osc->flush();
    host.end();
    out << "Transcript: " << host.csv_path().string() << "\n";
    return host.csv().error() ? 1 : 0;
}

int replay_csv(const std::filesystem::path& path, std::ostream& out) {
    auto transcript = read_csv(path);
    out << "Session " << transcript.session_id << " (" << transcript.turns.size() << " turns)\n";
    int problems = 0;
    std::optional<TaskPhase> phase;
    std::int64_t expected = 1;
    for (const auto& t : transcript.turns) {
        if (t.seq != expected) {
            out << "! seq " << t.seq << " where " << expected << " was expected\n";
            ++problems;
        }
        expected = t.seq + 1;
        if (phase != t.phase) {
            bool ok = !phase || validate_transition(*phase, t.phase);
            if (!ok) {
                out << "! phase jump " << to_string(*phase) << " -> " << to_string(t.phase) << "\n";
                ++problems;
            }
            out << "=== " << to_string(t.phase) << " ===\n";
            phase = t.phase;
        }
        out << "[" << t.seq << "] " << (t.role == Role::Learner ? "You" : t.role == Role::Agent ? "Tutor" : "System")
            << ": " << t.text;
        if (t.response_latency_ms) out << "  (" << *t.response_latency_ms << " ms)";
        out << "\n";
    }
    out << (problems ? "Transcript has problems.\n" : "Transcript is consistent.\n");
    return problems ? 1 : 0;
}

}  // namespace tutor::app
