#include "tutor/llm/http_backend.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <regex>
#include <thread>

#include "tutor/core/errors.hpp"

namespace tutor::llm {

using nlohmann::json;

void validate(const BackendConfig& config) {
    if (!(config.timeout_s > 0.0)) throw ConfigError("llm timeout_s must be positive");
    if (config.max_retries < 0) throw ConfigError("llm max_retries must not be negative");
    if (config.backoff_base_ms <= 0) throw ConfigError("llm backoff_base_ms must be positive");
    if (config.model_id.empty()) throw ConfigError("llm model_id must not be empty");
    parse_endpoint(config.endpoint_url);
}

Endpoint parse_endpoint(const std::string& url) {
    static const std::regex re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw ConfigError("bad endpoint URL: " + url);
    Endpoint ep;
    ep.scheme = m[1].str();
    ep.host = m[2].str();
    ep.port = m[3].matched ? std::stoi(m[3].str()) : (ep.scheme == "https" ? 443 : 80);
    ep.path = m[4].matched ? m[4].str() : "/";
    return ep;
}

std::string build_request_body(const std::string& model, std::span<const ChatMessage> messages,
                               double temperature) {
    json body;
    body["model"] = model;
    body["temperature"] = temperature;
    body["messages"] = json::array();
    for (const auto& m : messages)
        body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    return body.dump();
}

CompletionResult parse_response_body(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception&) {
        throw BackendProtocolError("completion response is not JSON", body);
    }
    try {
        const auto& choice = doc.at("choices").at(0);
        CompletionResult r;
        r.text = choice.at("message").at("content").get<std::string>();
        r.truncated = choice.contains("finish_reason") && choice["finish_reason"] == "length";
        return r;
    } catch (const json::exception&) {
        throw BackendProtocolError("completion response lacks choices[0].message.content", body);
    }
}

HttpBackend::HttpBackend(BackendConfig config, std::optional<std::string> api_key, Sleeper sleeper)
    : config_(std::move(config)), api_key_(std::move(api_key)), sleeper_(std::move(sleeper)) {
    validate(config_);
    endpoint_ = parse_endpoint(config_.endpoint_url);
    if (!api_key_ && !config_.api_key_env.empty()) {
        if (const char* v = std::getenv(config_.api_key_env.c_str()); v && *v) api_key_ = v;
    }
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

CompletionResult HttpBackend::do_complete(std::span<const ChatMessage> messages,
                                          const CompletionOptions& options) {
    auto body = build_request_body(config_.model_id, messages, options.temperature);

    httplib::Client client(endpoint_.scheme + "://" + endpoint_.host + ":" +
                           std::to_string(endpoint_.port));
    auto secs = static_cast<time_t>(config_.timeout_s);
    auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);

    std::string last_error;
    last_attempts_ = 0;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) sleeper_(std::chrono::milliseconds(config_.backoff_base_ms << (attempt - 1)));
        ++last_attempts_;

        auto started = std::chrono::steady_clock::now();
        auto res = client.Post(endpoint_.path, headers, body, "application/json");
        auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();

        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            spdlog::warn("completion attempt {} failed: {}", attempt + 1, last_error);
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            spdlog::warn("completion attempt {} failed: {}", attempt + 1, last_error);
            continue;
        }
        if (res->status != 200)
            throw BackendUnavailable("completion endpoint returned HTTP " +
                                     std::to_string(res->status) + ": " + res->body);

        auto result = parse_response_body(res->body);
        result.latency_ms = latency;
        return result;
    }
    throw BackendUnavailable("completion failed after " + std::to_string(last_attempts_) +
                             " attempts: " + last_error);
}

}  // namespace tutor::llm
