#pragma once

#include <stdexcept>
#include <string>

#include "tutor/core/types.hpp"

namespace tutor {

// Base for every error the engine raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Illegal phase transition attempt; carries the offending edge.
class ProtocolError : public Error {
public:
    ProtocolError(TaskPhase from, TaskPhase to, const std::string& reason);

    TaskPhase from() const { return from_; }
    TaskPhase to() const { return to_; }

private:
    TaskPhase from_;
    TaskPhase to_;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class BackendUnavailable : public Error {
public:
    using Error::Error;
};

// Backend answered, but not in the expected wire format.
class BackendProtocolError : public Error {
public:
    BackendProtocolError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}
    const std::string& raw_payload() const { return raw_; }

private:
    std::string raw_;
};

class StreamError : public Error {
public:
    using Error::Error;
};

class SpeechError : public Error {
public:
    using Error::Error;
};

class EncodingError : public Error {
public:
    using Error::Error;
};

class AssessmentError : public Error {
public:
    using Error::Error;
};

class TurnError : public Error {
public:
    using Error::Error;
};

}  // namespace tutor
