#include <spdlog/spdlog.h>

#include "tutor/core/errors.hpp"
#include "tutor/core/text.hpp"
#include "tutor/pedagogy/pedagogy.hpp"
#include "tutor/prompt/engine.hpp"

namespace tutor::pedagogy {

namespace {

enum class Section { None, General, Advice, Summary };

std::string strip_emphasis(std::string_view line) {
    std::string s;
    for (char c : line) {
        if (c != '*' && c != '#' && c != '_') s += c;
    }
    return text::trim(s);
}

// Header line -> section plus whatever follows the colon on that line.
std::optional<std::pair<Section, std::string>> header(std::string_view raw) {
    static const std::pair<std::string_view, Section> names[] = {
        {"general feedback", Section::General},
        {"advice moving forward", Section::Advice},
        {"language summary", Section::Summary},
    };
    auto line = strip_emphasis(raw);
    for (auto [name, section] : names) {
        if (!text::starts_with_icase(line, name)) continue;
        auto rest = text::trim(std::string_view(line).substr(name.size()));
        if (!rest.empty() && rest.front() == ':') rest = text::trim(std::string_view(rest).substr(1));
        else if (!rest.empty()) continue;  // "General feedback was..." is prose
        return std::pair{section, rest};
    }
    return std::nullopt;
}

std::optional<std::string> labelled(std::string_view line, std::string_view label) {
    auto s = strip_emphasis(line);
    std::string_view v = s;
    while (!v.empty() && (v.front() == '-' || v.front() == ' ')) v.remove_prefix(1);
    if (!text::starts_with_icase(v, label)) return std::nullopt;
    v.remove_prefix(label.size());
    auto rest = text::trim(v);
    if (rest.empty() || rest.front() != ':') return std::nullopt;
    return text::trim(std::string_view(rest).substr(1));
}

void append(std::string& dst, std::string_view piece) {
    auto t = text::trim(piece);
    if (t.empty()) return;
    if (!dst.empty()) dst += ' ';
    dst += t;
}

// First sentence and the remainder.
std::pair<std::string, std::string> split_first_sentence(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((s[i] == '.' || s[i] == '!' || s[i] == '?') && (i + 1 == s.size() || s[i + 1] == ' ')) {
            return {text::trim(std::string_view(s).substr(0, i + 1)),
                    text::trim(std::string_view(s).substr(i + 1))};
        }
    }
    return {text::trim(s), ""};
}

}  // namespace

FeedbackReport parse_feedback(std::string_view reply) {
    FeedbackReport report;
    Section current = Section::None;
    bool seen_general = false, seen_advice = false, seen_summary = false;
    std::string general_loose;

    auto take_general_line = [&](std::string_view line) {
        if (auto v = labelled(line, "strength")) append(report.general_feedback.strength, *v);
        else if (auto v = labelled(line, "improvement")) append(report.general_feedback.improvement, *v);
        else append(general_loose, strip_emphasis(line));
    };
    auto take_summary_line = [&](std::string_view raw) {
        auto line = strip_emphasis(raw);
        std::string_view v = line;
        while (!v.empty() && (v.front() == '-' || v.front() == ' ')) v.remove_prefix(1);
        if (v.empty()) return;
        auto colon = v.find(':');
        if (colon != std::string_view::npos) {
            if (auto kind = summary_kind_from_string(v.substr(0, colon))) {
                auto item = text::trim(v.substr(colon + 1));
                if (!item.empty()) report.language_summary.push_back({item, *kind});
                return;
            }
        }
        report.language_summary.push_back({text::trim(v), SummaryKind::Vocabulary});
    };

    for (const auto& line : text::split_lines(reply)) {
        if (auto h = header(line)) {
            current = h->first;
            if (current == Section::General) seen_general = true;
            if (current == Section::Advice) seen_advice = true;
            if (current == Section::Summary) seen_summary = true;
            if (!h->second.empty()) {
                if (current == Section::General) take_general_line(h->second);
                else if (current == Section::Advice) append(report.advice_moving_forward, h->second);
                else take_summary_line(h->second);
            }
            continue;
        }
        if (text::trim(line).empty()) continue;
        switch (current) {
            case Section::General: take_general_line(line); break;
            case Section::Advice: append(report.advice_moving_forward, strip_emphasis(line)); break;
            case Section::Summary: take_summary_line(line); break;
            case Section::None: break;
        }
    }

    auto& g = report.general_feedback;
    if (g.strength.empty() && g.improvement.empty() && !general_loose.empty()) {
        auto [first, rest] = split_first_sentence(general_loose);
        g.strength = first;
        g.improvement = rest;
    } else if (!general_loose.empty()) {
        append(g.improvement.empty() ? g.improvement : g.strength, general_loose);
    }

    report.incomplete = !seen_general || !seen_advice || !seen_summary || g.strength.empty() ||
                        g.improvement.empty() || report.advice_moving_forward.empty() ||
                        report.language_summary.empty();
    return report;
}

std::string format_feedback(const FeedbackReport& r) {
    std::string out = "**GENERAL FEEDBACK**:\n";
    out += "Strength: " + r.general_feedback.strength + "\n";
    out += "Improvement: " + r.general_feedback.improvement + "\n";
    out += "**ADVICE MOVING FORWARD**: " + r.advice_moving_forward + "\n";
    out += "**LANGUAGE SUMMARY**:";
    for (const auto& item : r.language_summary) {
        out += "\n- " + std::string(to_string(item.kind)) + ": " + item.item;
    }
    return out;
}

FeedbackReport generate_feedback(std::span<const TurnRecord> role_play_history,
                                 const prompt::PromptLibrary& lib, llm::ChatBackend& backend) {
    if (role_play_history.empty()) throw PreconditionError("feedback needs a role-play transcript");
    auto messages = prompt::render(lib, prompt::TemplateId::Feedback,
                                   {{"role_play_conversations", prompt::format_transcript(role_play_history)}});
    messages.push_back({ChatRole::User, lib.directive("feedback_format")});

    auto reply = backend.complete(messages, {llm::kConversationTemperature});
    auto report = parse_feedback(reply.text);
    if (!report.incomplete) return report;

    messages.push_back({ChatRole::Assistant, reply.text.empty() ? std::string("(no answer)") : reply.text});
    messages.push_back({ChatRole::User, lib.directive("feedback_retry")});
    auto retry = parse_feedback(backend.complete(messages, {llm::kConversationTemperature}).text);
    if (retry.incomplete) spdlog::warn("feedback still incomplete after a retry");
    return retry;
}

}  // namespace tutor::pedagogy
