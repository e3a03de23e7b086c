// Error types shared across the library. Each condition the public API can
// raise gets its own exception class so callers can catch precisely.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace msri {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- datamodel ---
struct EmptyTag : Error {
  EmptyTag() : Error("empty morphological tag") {}
};
struct BadSchema : Error {
  explicit BadSchema(const std::string& msg) : Error("bad tag schema: " + msg) {}
};
struct EmptyForm : Error {
  EmptyForm() : Error("empty word form") {}
};

// --- dataset / file ingestion ---
struct ParseError : Error {
  std::size_t line;
  ParseError(std::size_t line_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};
struct ConflictError : Error {
  explicit ConflictError(const std::string& msg) : Error("conflict: " + msg) {}
};
struct UnknownLemma : Error {
  explicit UnknownLemma(const std::string& lemma) : Error("unknown lemma: " + lemma) {}
};
struct TooFewInstances : Error {
  explicit TooFewInstances(const std::string& msg) : Error("too few instances: " + msg) {}
};
struct SpecError : Error {
  explicit SpecError(const std::string& msg) : Error("bad configuration: " + msg) {}
};

// --- numerics / model ---
struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error("shape mismatch: " + msg) {}
};
struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& msg) : Error("index out of range: " + msg) {}
};
struct NonDeterministicLoss : Error {
  NonDeterministicLoss() : Error("loss function is not deterministic") {}
};
struct AllMasked : Error {
  AllMasked() : Error("attention over fully masked input") {}
};

// --- training / evaluation ---
struct EmptySplit : Error {
  explicit EmptySplit(const std::string& which) : Error("empty data split: " + which) {}
};
struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& msg) : Error("length mismatch: " + msg) {}
};
struct InstanceMismatch : Error {
  explicit InstanceMismatch(const std::string& msg) : Error("instance mismatch: " + msg) {}
};
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

}  // namespace msri
