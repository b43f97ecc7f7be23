#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace gts {

struct SourceSpan {
  std::size_t begin = 0;  // byte offsets into the input
  std::size_t end = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  SourceSpan span;
  std::string message;
  Severity severity = Severity::Error;

  std::string to_string() const {
    return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
           (severity == Severity::Error ? "error: " : "warning: ") + message;
  }
};

/// Either a parsed value or the diagnostic that stopped parsing.
template <class T>
class Parsed {
 public:
  Parsed(T value) : v_(std::move(value)) {}
  Parsed(Diagnostic d) : v_(std::move(d)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::runtime_error(diagnostic().to_string());
    return std::get<T>(v_);
  }
  T&& value() && {
    if (!ok()) throw std::runtime_error(diagnostic().to_string());
    return std::get<T>(std::move(v_));
  }
  const Diagnostic& diagnostic() const { return std::get<Diagnostic>(v_); }

 private:
  std::variant<T, Diagnostic> v_;
};

/// Line/column for a byte offset.
inline SourceSpan span_at(const std::string& text, std::size_t begin, std::size_t end) {
  SourceSpan s;
  s.begin = std::min(begin, text.size());
  s.end = std::min(std::max(end, s.begin), text.size());
  for (std::size_t i = 0; i < s.begin; ++i) {
    if (text[i] == '\n') {
      ++s.line;
      s.column = 1;
    } else {
      ++s.column;
    }
  }
  return s;
}

}  // namespace gts
