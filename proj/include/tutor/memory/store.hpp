#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tutor/core/types.hpp"

namespace tutor::memory {

struct SessionSummary {
    std::string learner_id;
    std::string session_id;
    TimePoint created_at{};
    std::vector<std::string> key_facts;
    std::optional<CefrLevel> assessed_level;
    std::vector<std::string> scenarios_practiced;
    std::string summary_text;

    bool operator==(const SessionSummary&) const = default;
};

// Long-term memory. Implementations keep summaries across process restarts.
class MemoryStore {
public:
    virtual ~MemoryStore() = default;
    virtual void put(const SessionSummary& summary) = 0;
    // Newest first by created_at; ties keep reverse insertion order.
    virtual std::vector<SessionSummary> list_by_learner(const std::string& learner_id) const = 0;
};

inline constexpr int kSummarySchemaVersion = 1;

std::string to_json_line(const SessionSummary& summary);
SessionSummary summary_from_json_line(const std::string& line);

// Append-only JSON-lines file; one summary per line with a "v" schema field.
// Each put is a single write on an O_APPEND descriptor, so records never
// interleave; puts from one process are serialized by a mutex.
class JsonlMemoryStore final : public MemoryStore {
public:
    explicit JsonlMemoryStore(std::filesystem::path path);

    void put(const SessionSummary& summary) override;
    std::vector<SessionSummary> list_by_learner(const std::string& learner_id) const override;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
};

// The k most recent summary texts, newest first, joined by newlines; nullopt
// for a learner with no history. Throws PreconditionError when k < 1.
std::optional<std::string> recall(const MemoryStore& store, const std::string& learner_id, int k);

}  // namespace tutor::memory
