#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tutor/core/types.hpp"

namespace tutor::app {

inline constexpr const char* kCsvHeader =
    "session_id,seq,ts_start_iso,ts_end_iso,phase,role,text,latency_ms,emotion";

// RFC 4180: fields holding a comma, quote, CR or LF are quoted and quotes
// doubled. Rows end in CRLF.
std::string csv_escape(std::string_view field);
std::string csv_row(const std::string& session_id, const TurnRecord& turn);

// Parses a whole RFC 4180 document into rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

struct CsvTranscript {
    std::string session_id;
    std::vector<TurnRecord> turns;
};

// Throws EncodingError on a malformed file or a header mismatch.
CsvTranscript read_csv(const std::filesystem::path& path);

// Whole-transcript writer; throws Error on I/O failure.
void write_csv(const std::string& session_id, std::span<const TurnRecord> turns,
               const std::filesystem::path& path);

// Incremental transcript log: header on open, one flushed row per turn. I/O
// failures are remembered rather than thrown so a session keeps going; the
// caller reports error() at exit.
class CsvLog {
public:
    CsvLog(std::string session_id, std::filesystem::path path);

    void append(const TurnRecord& turn);
    void close();

    const std::filesystem::path& path() const { return path_; }
    const std::optional<std::string>& error() const { return error_; }

private:
    void fail(const std::string& what);

    std::string session_id_;
    std::filesystem::path path_;
    std::ofstream out_;
    std::optional<std::string> error_;
};

}  // namespace tutor::app
