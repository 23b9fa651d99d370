#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace toolcache {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MalformedRequest : public Error {
  public:
    explicit MalformedRequest(std::string field)
        : Error("malformed request: " + field), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

class UnsupportedValue : public Error {
  public:
    using Error::Error;
};

class UnknownTool : public Error {
  public:
    explicit UnknownTool(const std::string& tool) : Error("unknown tool: " + tool), tool_(tool) {}
    const std::string& tool() const noexcept { return tool_; }

  private:
    std::string tool_;
};

class EndpointUnavailable : public Error {
  public:
    using Error::Error;
};

class MalformedLLMResponse : public Error {
  public:
    using Error::Error;
};

class NonFiniteFeature : public Error {
  public:
    using Error::Error;
};

class EmptyRange : public Error {
  public:
    using Error::Error;
};

class EmptyCache : public Error {
  public:
    EmptyCache() : Error("cache is empty") {}
};

class InvalidPhasing : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class UnsupportedFormat : public Error {
  public:
    using Error::Error;
};

class TraceParseError : public Error {
  public:
    // Line 0 means the failure is not tied to a record (e.g. unreadable file).
    TraceParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? "trace: " + what : "trace line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace toolcache
