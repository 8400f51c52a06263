#pragma once

#include <stdexcept>
#include <string>

namespace cefrsimp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user input: unknown labels, bad dataset lines, mismatched ids.
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values or files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A level head or embedder failed. `source()` names the backend.
class ScorerError : public Error {
public:
    ScorerError(std::string source, const std::string& what)
        : Error(source + ": " + what), source_(std::move(source)) {}

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
};

/// The LLM produced no usable completion.
class LlmError : public Error {
public:
    enum class Kind { kTimeout, kTransport, kBadResponse, kEmpty };

    LlmError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Broken internal contract (e.g. scoring a candidate that was never predicted).
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace cefrsimp
