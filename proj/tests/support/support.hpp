#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "tutor/core/clock.hpp"
#include "tutor/core/types.hpp"
#include "tutor/pedagogy/data.hpp"
#include "tutor/prompt/templates.hpp"
#include "tutor/resources/resources.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return TUTOR_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "tests" / "fixtures" / rel; }
inline std::filesystem::path golden(const std::string& rel) { return source_dir() / "tests" / "golden" / rel; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary);
    out << data;
}

// Fresh directory per call, removed by the OS tmp cleaner, not by us.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto p = std::filesystem::temp_directory_path() /
             ("tutor-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline tutor::TimePoint t0() { return tutor::parse_iso8601("2024-05-01T10:00:00.000Z"); }

inline tutor::TurnRecord turn(std::int64_t seq, tutor::Role role, std::string text,
                              tutor::TaskPhase phase = tutor::TaskPhase::RolePlay) {
    tutor::TurnRecord t;
    t.seq = seq;
    t.role = role;
    t.text = std::move(text);
    t.phase = phase;
    t.started_at = t0() + std::chrono::seconds(seq);
    t.ended_at = t.started_at + std::chrono::milliseconds(500);
    return t;
}

struct Env {
    tutor::resources::Resources res;
    tutor::prompt::PromptLibrary lib{res};
    tutor::pedagogy::PedagogyData data = tutor::pedagogy::PedagogyData::load(res);
};

inline const Env& env() {
    static Env e;
    return e;
}

inline std::string words(int n, const std::string& w = "word") {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + w;
    return s;
}

using Rng = std::mt19937_64;

}  // namespace testing
