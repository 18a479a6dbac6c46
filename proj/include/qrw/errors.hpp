#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrw {

/// Byte range into a parsed input. Attached to every parse-time error.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Root of all engine errors. `kind()` is the stable name used in JSON
/// payloads and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

class SortError : public Error {
 public:
  SortError(std::string position, std::string reason)
      : Error("sort error at " + position + ": " + reason),
        position_(std::move(position)),
        reason_(std::move(reason)) {}
  SortError(std::string position, std::string reason, SourceSpan span)
      : SortError(std::move(position), std::move(reason)) {
    span_ = span;
    has_span_ = true;
  }
  const char* kind() const noexcept override { return "SortError"; }
  const std::string& position() const { return position_; }
  const std::string& reason() const { return reason_; }
  bool hasSpan() const { return has_span_; }
  SourceSpan span() const { return span_; }

 private:
  std::string position_;
  std::string reason_;
  SourceSpan span_{};
  bool has_span_ = false;
};

class InvalidPosition : public Error {
 public:
  explicit InvalidPosition(const std::string& position)
      : Error("invalid position " + position) {}
  const char* kind() const noexcept override { return "InvalidPosition"; }
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, std::string expected, std::size_t line = 0)
      : Error(describe(span, expected, line)),
        span_(span),
        expected_(std::move(expected)),
        line_(line) {}
  const char* kind() const noexcept override { return "ParseError"; }
  SourceSpan span() const { return span_; }
  const std::string& expected() const { return expected_; }
  /// 1-based line for line-oriented formats, 0 otherwise.
  std::size_t line() const { return line_; }

 private:
  static std::string describe(SourceSpan span, const std::string& expected,
                              std::size_t line) {
    std::string msg = "parse error";
    if (line != 0) msg += " on line " + std::to_string(line);
    msg += " at " + std::to_string(span.start) + ".." +
           std::to_string(span.end) + ": expected " + expected;
    return msg;
  }
  SourceSpan span_;
  std::string expected_;
  std::size_t line_;
};

class NoMatch : public Error {
 public:
  NoMatch(const std::string& rule_id, const std::string& position)
      : Error("rule " + rule_id + " does not match at " + position) {}
  const char* kind() const noexcept override { return "NoMatch"; }
};

class UnknownRule : public Error {
 public:
  explicit UnknownRule(const std::string& rule_id)
      : Error("unknown rule " + rule_id) {}
  const char* kind() const noexcept override { return "UnknownRule"; }
};

class DirectionNotAllowed : public Error {
 public:
  explicit DirectionNotAllowed(const std::string& rule_id)
      : Error("rule " + rule_id + " cannot be applied in reverse") {}
  const char* kind() const noexcept override { return "DirectionNotAllowed"; }
};

class IllFormedRule : public Error {
 public:
  IllFormedRule(const std::string& rule_id, const std::string& reason)
      : Error("ill-formed rule " + rule_id + ": " + reason) {}
  const char* kind() const noexcept override { return "IllFormedRule"; }
};

class StepLimitExceeded : public Error {
 public:
  explicit StepLimitExceeded(std::size_t max_steps)
      : Error("step limit of " + std::to_string(max_steps) + " exceeded"),
        max_steps_(max_steps) {}
  const char* kind() const noexcept override { return "StepLimitExceeded"; }
  std::size_t maxSteps() const { return max_steps_; }

 private:
  std::size_t max_steps_;
};

class ReplayError : public Error {
 public:
  ReplayError(std::size_t step_index, const std::string& cause)
      : Error("replay failed at step " + std::to_string(step_index) + ": " +
              cause),
        step_index_(step_index),
        cause_(cause) {}
  const char* kind() const noexcept override { return "ReplayError"; }
  /// 0-based index into the step list.
  std::size_t stepIndex() const { return step_index_; }
  const std::string& cause() const { return cause_; }

 private:
  std::size_t step_index_;
  std::string cause_;
};

class UnassignedConstant : public Error {
 public:
  explicit UnassignedConstant(const std::string& name)
      : Error("no value assigned to constant " + name) {}
  const char* kind() const noexcept override { return "UnassignedConstant"; }
};

}  // namespace qrw
