#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include "support.hpp"
#include "tutor/core/errors.hpp"
#include "tutor/llm/scripted_backend.hpp"
#include "tutor/memory/store.hpp"
#include "tutor/memory/summarize.hpp"
#include "tutor/memory/window.hpp"

using namespace tutor;
using namespace tutor::memory;
using testing::turn;

namespace {

// Smallest start index whose suffix fits, found by trying every start; then
// widened to the latest learner turn.
std::size_t oracle_start(const std::vector<TurnRecord>& turns, int budget) {
    std::size_t best = turns.size();
    for (std::size_t s = 0; s <= turns.size(); ++s) {
        std::size_t sum = 0;
        for (std::size_t i = s; i < turns.size(); ++i) sum += (turns[i].text.size() + 3) / 4;
        if (sum <= static_cast<std::size_t>(budget)) {
            best = s;
            break;
        }
    }
    for (std::size_t i = turns.size(); i-- > 0;) {
        if (turns[i].role == Role::Learner) {
            best = std::min(best, i);
            break;
        }
    }
    return best;
}

SessionSummary summary(std::string learner, std::string session, int minute) {
    SessionSummary s;
    s.learner_id = std::move(learner);
    s.session_id = std::move(session);
    s.created_at = testing::t0() + std::chrono::minutes(minute);
    s.key_facts = {"likes coffee", "from \"Chile\", says hi\nthere"};
    s.assessed_level = CefrLevel::B1;
    s.scenarios_practiced = {"lib-cafe"};
    s.summary_text = "Session " + s.session_id + " summary";
    return s;
}

}  // namespace

TEST_CASE("window basics") {
    std::vector<TurnRecord> three = {turn(1, Role::Agent, "hello"), turn(2, Role::Learner, "hi"),
                                     turn(3, Role::Agent, "how are you")};
    CHECK(window(three, 10000) == three);
    std::vector<TurnRecord> big = {turn(1, Role::Learner, std::string(4000, 'x'))};
    CHECK(window(big, 10) == big);
    CHECK(window({}, 10).empty());
    CHECK_THROWS_AS(window(three, 0), PreconditionError);
    CHECK(approx_tokens("abcde") == 2);
}

TEST_CASE("hundred turns with a small budget keep a suffix") {
    std::vector<TurnRecord> turns;
    for (int i = 1; i <= 100; ++i)
        turns.push_back(turn(i, i % 2 ? Role::Agent : Role::Learner, testing::words(10)));
    auto w = window(turns, 200);
    CHECK(w.size() < turns.size());
    CHECK(w.back() == turns.back());
    CHECK(std::equal(w.begin(), w.end(), turns.end() - static_cast<std::ptrdiff_t>(w.size())));
}

TEST_CASE("window matches greedy-suffix oracle on random histories") {
    testing::Rng rng(1234);
    for (int h = 0; h < 1000; ++h) {
        std::vector<TurnRecord> turns;
        auto n = rng() % 40;
        for (std::size_t i = 0; i < n; ++i) {
            auto role = rng() % 3 == 0 ? Role::Learner : Role::Agent;
            turns.push_back(turn(static_cast<std::int64_t>(i + 1), role, std::string(rng() % 300, 'a')));
        }
        int budget = 1 + static_cast<int>(rng() % 400);
        auto w = window(turns, budget);
        auto s = oracle_start(turns, budget);
        REQUIRE(w.size() == turns.size() - s);
        REQUIRE(std::equal(w.begin(), w.end(), turns.begin() + static_cast<std::ptrdiff_t>(s)));
        auto last_learner = std::find_if(turns.rbegin(), turns.rend(),
                                         [](const auto& t) { return t.role == Role::Learner; });
        if (last_learner != turns.rend()) CHECK(std::find(w.begin(), w.end(), *last_learner) != w.end());
    }
}

TEST_CASE("json line round trip") {
    auto s = summary("ana", "s1", 0);
    CHECK(summary_from_json_line(to_json_line(s)) == s);
    CHECK(to_json_line(s).find('\n') == std::string::npos);
    s.assessed_level.reset();
    CHECK(summary_from_json_line(to_json_line(s)) == s);
}

TEST_CASE("summaries survive a process restart") {
    auto path = testing::temp_dir("mem") / "memory.jsonl";
    std::vector<SessionSummary> written;
    for (int i = 0; i < 3; ++i) written.push_back(summary("ana", "s" + std::to_string(i), i));
    written.push_back(summary("ben", "b0", 5));

    pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
        JsonlMemoryStore store(path);
        for (const auto& s : written) store.put(s);
        ::_exit(0);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    REQUIRE(WIFEXITED(status));
    REQUIRE(WEXITSTATUS(status) == 0);

    JsonlMemoryStore fresh(path);
    auto ana = fresh.list_by_learner("ana");
    REQUIRE(ana.size() == 3);
    CHECK(ana[0] == written[2]);
    CHECK(ana[1] == written[1]);
    CHECK(ana[2] == written[0]);
    CHECK(fresh.list_by_learner("ben") == std::vector<SessionSummary>{written[3]});
    CHECK(fresh.list_by_learner("nobody").empty());
}

TEST_CASE("concurrent writers never interleave records") {
    auto path = testing::temp_dir("mem") / "memory.jsonl";
    constexpr int kProcs = 4, kEach = 50;
    std::vector<pid_t> kids;
    for (int p = 0; p < kProcs; ++p) {
        pid_t pid = ::fork();
        if (pid == 0) {
            JsonlMemoryStore store(path);
            for (int i = 0; i < kEach; ++i) {
                auto s = summary("w", "p" + std::to_string(p) + "-" + std::to_string(i), i);
                s.summary_text = std::string(2000, static_cast<char>('a' + p));
                store.put(s);
            }
            ::_exit(0);
        }
        kids.push_back(pid);
    }
    for (auto pid : kids) ::waitpid(pid, nullptr, 0);
    auto all = JsonlMemoryStore(path).list_by_learner("w");
    CHECK(all.size() == kProcs * kEach);
}

TEST_CASE("recall ordering") {
    auto path = testing::temp_dir("mem") / "m.jsonl";
    JsonlMemoryStore store(path);
    CHECK_FALSE(recall(store, "ana", 3));
    store.put(summary("ana", "old", 0));
    store.put(summary("ana", "new", 10));
    CHECK(recall(store, "ana", 1) == "Session new summary");
    store.put(summary("ana", "mid", 5));
    CHECK(recall(store, "ana", 2) == "Session new summary\nSession mid summary");
    CHECK_THROWS_AS(recall(store, "ana", 0), PreconditionError);
}

TEST_CASE("summarize session") {
    std::vector<TurnRecord> turns = {turn(1, Role::Agent, "Welcome to the cafe"),
                                     turn(2, Role::Learner, "A latte please")};
    LearnerProfile profile{"ana"};
    SessionFacts facts{"s1", CefrLevel::A2, {"lib-cafe"}, testing::t0()};

    llm::ScriptedBackend backend({{std::nullopt, "Learner practiced café ordering; B1."}});
    auto s = summarize_session(turns, profile, facts, backend, "persona", "summarize");
    CHECK(s.summary_text == "Learner practiced café ordering; B1.");
    CHECK(s.assessed_level == CefrLevel::A2);
    CHECK(s.learner_id == "ana");
    CHECK(s.session_id == "s1");
    CHECK(s.scenarios_practiced == std::vector<std::string>{"lib-cafe"});

    llm::ScriptedBackend facts_backend({{std::nullopt, "Overview\n- orders coffee\n- level C2\nDone"}});
    auto f = summarize_session(turns, profile, facts, facts_backend, "persona", "summarize");
    CHECK(f.key_facts == std::vector<std::string>{"orders coffee", "level C2"});
    CHECK(f.assessed_level == CefrLevel::A2);

    CHECK_THROWS_AS(summarize_session({}, profile, facts, backend, "p", "i"), PreconditionError);
}
