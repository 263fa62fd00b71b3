#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nerpipe {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (CoNLL line, JSONL record, schema document).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A value violates a domain-type invariant. `id` names the offending record.
class InvariantError : public Error {
 public:
  InvariantError(const std::string& id, const std::string& reason)
      : Error("sentence '" + id + "': " + reason), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class TagFormatError : public Error {
 public:
  TagFormatError(const std::string& tag, std::size_t position)
      : Error("invalid tag '" + tag + "' at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class MaskError : public Error {
 public:
  using Error::Error;
};

// Re-injection failures. Both subclasses are retryable from the
// augmentation loop's point of view.
class ReinjectError : public Error {
 public:
  using Error::Error;
};

class MismatchError : public ReinjectError {
 public:
  MismatchError(std::size_t found, std::size_t expected, const std::string& label = "")
      : ReinjectError("placeholder count mismatch" +
                      (label.empty() ? std::string() : " for " + label) + ": found " +
                      std::to_string(found) + ", expected " + std::to_string(expected)),
        found_(found),
        expected_(expected) {}
  std::size_t found() const { return found_; }
  std::size_t expected() const { return expected_; }

 private:
  std::size_t found_;
  std::size_t expected_;
};

class UnknownLabelError : public ReinjectError {
 public:
  explicit UnknownLabelError(const std::string& placeholder)
      : ReinjectError("unknown placeholder <<" + placeholder + ">>"), placeholder_(placeholder) {}
  const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

// LLM response body is not a usable variants document.
class ResponseParseError : public Error {
 public:
  using Error::Error;
};

class CountError : public Error {
 public:
  CountError(std::size_t found, std::size_t expected)
      : Error("expected " + std::to_string(expected) + " variants, found " + std::to_string(found)),
        found_(found),
        expected_(expected) {}
  std::size_t found() const { return found_; }
  std::size_t expected() const { return expected_; }

 private:
  std::size_t found_;
  std::size_t expected_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// A label is missing from the schema, or the schema itself is invalid.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, const std::string& label) : Error(what), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nerpipe
