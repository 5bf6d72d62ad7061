#include "tutor/memory/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "tutor/core/clock.hpp"
#include "tutor/core/errors.hpp"

namespace tutor::memory {

using nlohmann::json;

std::string to_json_line(const SessionSummary& s) {
    json j;
    j["v"] = kSummarySchemaVersion;
    j["learner_id"] = s.learner_id;
    j["session_id"] = s.session_id;
    j["created_at"] = format_iso8601(s.created_at);
    j["key_facts"] = s.key_facts;
    j["assessed_level"] = s.assessed_level ? json(std::string(to_string(*s.assessed_level))) : json();
    j["scenarios_practiced"] = s.scenarios_practiced;
    j["summary_text"] = s.summary_text;
    return j.dump();
}

SessionSummary summary_from_json_line(const std::string& line) {
    auto j = json::parse(line);
    auto v = j.at("v").get<int>();
    if (v != kSummarySchemaVersion)
        throw Error("unsupported summary schema version " + std::to_string(v));
    SessionSummary s;
    s.learner_id = j.at("learner_id").get<std::string>();
    s.session_id = j.at("session_id").get<std::string>();
    s.created_at = parse_iso8601(j.at("created_at").get<std::string>());
    s.key_facts = j.at("key_facts").get<std::vector<std::string>>();
    if (!j.at("assessed_level").is_null())
        s.assessed_level = cefr_from_string(j["assessed_level"].get<std::string>());
    s.scenarios_practiced = j.at("scenarios_practiced").get<std::vector<std::string>>();
    s.summary_text = j.at("summary_text").get<std::string>();
    return s;
}

JsonlMemoryStore::JsonlMemoryStore(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void JsonlMemoryStore::put(const SessionSummary& summary) {
    if (summary.summary_text.empty()) throw PreconditionError("summary_text must not be empty");
    if (summary.learner_id.empty()) throw PreconditionError("summary learner_id must not be empty");

    auto line = to_json_line(summary) + "\n";
    std::lock_guard lock(mutex_);
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw Error("cannot open memory store " + path_.string() + ": " + std::strerror(errno));
    auto written = ::write(fd, line.data(), line.size());
    int err = errno;
    ::fsync(fd);
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size()))
        throw Error("short write to memory store: " + std::string(std::strerror(err)));
}

std::vector<SessionSummary> JsonlMemoryStore::list_by_learner(const std::string& learner_id) const {
    std::vector<SessionSummary> out;
    std::lock_guard lock(mutex_);
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto s = summary_from_json_line(line);
        if (s.learner_id == learner_id) out.push_back(std::move(s));
    }
    std::reverse(out.begin(), out.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.created_at > b.created_at; });
    return out;
}

std::optional<std::string> recall(const MemoryStore& store, const std::string& learner_id, int k) {
    if (k < 1) throw PreconditionError("recall k must be at least 1");
    auto summaries = store.list_by_learner(learner_id);
    if (summaries.empty()) return std::nullopt;
    std::string out;
    for (int i = 0; i < k && i < static_cast<int>(summaries.size()); ++i) {
        if (!out.empty()) out += '\n';
        out += summaries[static_cast<std::size_t>(i)].summary_text;
    }
    return out;
}

}  // namespace tutor::memory
