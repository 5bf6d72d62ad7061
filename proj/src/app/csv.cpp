#include "tutor/app/csv.hpp"

#include <charconv>
#include <sstream>

#include "tutor/core/clock.hpp"
#include "tutor/core/errors.hpp"

namespace tutor::app {

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::string& session_id, const TurnRecord& t) {
    std::string row;
    row += csv_escape(session_id) + ",";
    row += std::to_string(t.seq) + ",";
    row += format_iso8601(t.started_at) + ",";
    row += format_iso8601(t.ended_at) + ",";
    row += std::string(to_string(t.phase)) + ",";
    row += std::string(to_string(t.role)) + ",";
    row += csv_escape(t.text) + ",";
    if (t.response_latency_ms) row += std::to_string(*t.response_latency_ms);
    row += ",";
    if (t.emotion) row += std::string(to_string(*t.emotion));
    row += "\r\n";
    return row;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t i = 0;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < text.size()) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < text.size() && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
                    throw EncodingError("csv: stray character after closing quote");
                }
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        if (c == '"' && !field_started && field.empty()) {
            quoted = true;
            field_started = true;
            ++i;
        } else if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_row();
            i += (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
        } else {
            if (c == '"') throw EncodingError("csv: quote inside an unquoted field");
            field += c;
            field_started = true;
            ++i;
        }
    }
    if (quoted) throw EncodingError("csv: unterminated quoted field");
    if (field_started || !row.empty()) end_row();
    return rows;
}

namespace {

std::int64_t parse_int(const std::string& s, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw EncodingError(std::string("csv: bad ") + what + " '" + s + "'");
    return v;
}

}  // namespace

CsvTranscript read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EncodingError("csv: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto rows = parse_csv(buf.str());
    if (rows.empty()) throw EncodingError("csv: empty file");

    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    if (header != kCsvHeader) throw EncodingError("csv: unexpected header '" + header + "'");

    CsvTranscript out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r];
        if (f.size() != 9) throw EncodingError("csv: row " + std::to_string(r) + " has " + std::to_string(f.size()) + " fields");
        if (out.session_id.empty()) out.session_id = f[0];
        TurnRecord t;
        t.seq = parse_int(f[1], "seq");
        try {
            t.started_at = parse_iso8601(f[2]);
            t.ended_at = parse_iso8601(f[3]);
        } catch (const Error& e) {
            throw EncodingError(std::string("csv: ") + e.what());
        }
        auto phase = phase_from_string(f[4]);
        auto role = role_from_string(f[5]);
        if (!phase || !role) throw EncodingError("csv: bad phase or role in row " + std::to_string(r));
        t.phase = *phase;
        t.role = *role;
        t.text = f[6];
        if (!f[7].empty()) t.response_latency_ms = parse_int(f[7], "latency_ms");
        if (!f[8].empty()) {
            auto e = emotion_from_string(f[8]);
            if (!e) throw EncodingError("csv: bad emotion '" + f[8] + "'");
            t.emotion = *e;
        }
        out.turns.push_back(std::move(t));
    }
    return out;
}

void write_csv(const std::string& session_id, std::span<const TurnRecord> turns,
               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << kCsvHeader << "\r\n";
    for (const auto& t : turns) out << csv_row(session_id, t);
    out.flush();
    if (!out) throw Error("write failed for " + path.string());
}

CsvLog::CsvLog(std::string session_id, std::filesystem::path path)
    : session_id_(std::move(session_id)), path_(std::move(path)) {
    std::error_code ec;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) {
        fail("cannot open " + path_.string());
        return;
    }
    out_ << kCsvHeader << "\r\n";
    out_.flush();
    if (!out_) fail("write failed for " + path_.string());
}

void CsvLog::append(const TurnRecord& turn) {
    if (error_ || !out_.is_open()) return;
    out_ << csv_row(session_id_, turn);
    out_.flush();
    if (!out_) fail("write failed for " + path_.string());
}

void CsvLog::close() {
    if (out_.is_open()) out_.close();
}

void CsvLog::fail(const std::string& what) {
    if (!error_) error_ = what;
}

}  // namespace tutor::app
