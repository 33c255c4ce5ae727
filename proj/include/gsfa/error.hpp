#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace gsfa {

enum class ErrorKind {
  dimension,
  contract,
  degenerate,
  parameter,
  unsupported,
  singular,
  architecture,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::contract: return "contract error";
    case ErrorKind::degenerate: return "degenerate input";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::unsupported: return "unsupported input";
    case ErrorKind::singular: return "singularity error";
    case ErrorKind::architecture: return "architecture error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

/// All library failures are reported through this exception; `kind()` lets
/// callers (and the CLI exit-code mapping) distinguish categories.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// what() without the kind prefix, for re-wrapping with more context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

// Warnings go through a replaceable sink so tests and the CLI can capture them.
using WarningSink = std::function<void(const std::string&)>;

inline WarningSink& warning_sink() {
  static WarningSink sink = [](const std::string& msg) { std::cerr << "gsfa warning: " << msg << '\n'; };
  return sink;
}

inline void warn(const std::string& msg) {
  if (warning_sink()) warning_sink()(msg);
}

/// Installs a sink for the lifetime of the guard and restores the previous one.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink) : previous_(std::exchange(warning_sink(), std::move(sink))) {}
  ~ScopedWarningSink() { warning_sink() = std::move(previous_); }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

}  // namespace gsfa
