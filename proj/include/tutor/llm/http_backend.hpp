#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>

#include "tutor/llm/backend.hpp"

namespace tutor::llm {

struct BackendConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_id = "gpt-4";
    double timeout_s = 30.0;
    int max_retries = 2;
    int backoff_base_ms = 500;
    std::string api_key_env = "ELLMA_API_KEY";
};

void validate(const BackendConfig& config);

struct Endpoint {
    std::string scheme;  // http or https
    std::string host;
    int port = 0;
    std::string path;
};

// Splits scheme://host[:port]/path; throws ConfigError on anything else.
Endpoint parse_endpoint(const std::string& url);

// Speaks the chat-completions JSON format:
//   request  {model, messages[{role, content}], temperature}
//   response choices[0].message.content
// HTTP 429, 5xx and transport failures are retried up to max_retries times,
// waiting backoff_base_ms * 2^attempt before each retry.
class HttpBackend final : public ChatBackend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpBackend(BackendConfig config, std::optional<std::string> api_key = std::nullopt,
                         Sleeper sleeper = {});

    std::string name() const override { return "http:" + config_.model_id; }
    const BackendConfig& config() const { return config_; }

    // Attempts made by the most recent call.
    int last_attempts() const { return last_attempts_; }

protected:
    CompletionResult do_complete(std::span<const ChatMessage> messages,
                                 const CompletionOptions& options) override;

private:
    BackendConfig config_;
    Endpoint endpoint_;
    std::optional<std::string> api_key_;
    Sleeper sleeper_;
    int last_attempts_ = 0;
};

std::string build_request_body(const std::string& model, std::span<const ChatMessage> messages,
                               double temperature);

// Extracts choices[0].message.content; throws BackendProtocolError carrying
// the raw body when the shape is wrong.
CompletionResult parse_response_body(const std::string& body);

}  // namespace tutor::llm
