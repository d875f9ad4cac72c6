#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lgm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed a value that violates an operation precondition
/// (empty sentence, empty lemma, bad config bound).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A referenced entity does not exist (section id, concept lemma, template id).
class NotFound : public Error {
 public:
  using Error::Error;
};

/// A graph mutation would break a structural invariant
/// (self-loop, inheritance cycle, storing an invalid relation).
class GraphConstraintError : public Error {
 public:
  using Error::Error;
};

/// A persisted or structured file could not be decoded.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t position) : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnsupportedVersion : public Error {
 public:
  UnsupportedVersion(const std::string& what, int version) : Error(what), version_(version) {}
  int version() const noexcept { return version_; }

 private:
  int version_;
};

/// External annotator could not be started or broke the line protocol.
class AnnotatorError : public Error {
 public:
  using Error::Error;
};

/// Transport-level chat failure (connection, timeout, HTTP status, no script match).
/// Carries the request digest so trace records can be correlated.
class LlmError : public Error {
 public:
  LlmError(const std::string& what, std::string digest) : Error(what), digest_(std::move(digest)) {}
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

/// The model replied, but not in the structured form the prompt demands.
/// Raised only after the single re-ask has also failed.
class ResponseParseError : public Error {
 public:
  ResponseParseError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

/// Dataset file does not follow the named public schema.
class DatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace lgm
