#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "tutor/app/host.hpp"
#include "tutor/embodiment/sender.hpp"
#include "tutor/speech/adapters.hpp"
#include "tutor/speech/endpoint.hpp"

namespace tutor::app {

// Interactive text loop. Lines starting with '/' are commands:
//   /end  /switch  /scenarios  /scenario <description>  /help
// Returns 0, or 1 when the transcript log hit an I/O error.
int run_text_session(SessionHost& host, std::istream& in, std::ostream& out);

struct VoiceIo {
    std::filesystem::path input_wav;  // capture source (WAV fixture)
    speech::SttAdapter& stt;
    speech::TtsAdapter& tts;
    speech::AudioSink& sink;
    embodiment::OscSender* osc = nullptr;  // null: no avatar output
    const embodiment::ExpressionTable* expressions = nullptr;
    speech::EndpointConfig endpoint;
    std::string voice_id = "alloy";
};

// Capture -> endpointing -> STT -> run_turn -> TTS -> sink, with avatar
// expression and chatbox messages alongside each agent turn. ConfigError
// when the input cannot be opened.
int run_voice_session(SessionHost& host, const VoiceIo& io, std::ostream& out);

// Prints a logged transcript and checks it: seq gap-free from 1, phases
// along the phase graph. Returns 0 when consistent.
int replay_csv(const std::filesystem::path& path, std::ostream& out);

}  // namespace tutor::app
