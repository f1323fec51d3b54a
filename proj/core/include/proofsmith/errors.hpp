#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace proofsmith {

// Root of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- statements -----------------------------------------------------------

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected)
      : Error("parse error at byte " + std::to_string(offset) + ": expected " + expected),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class MultipleTheorems : public Error {
 public:
  explicit MultipleTheorems(std::size_t second_offset)
      : Error("more than one theorem declaration (second at byte " +
              std::to_string(second_offset) + ")"),
        offset_(second_offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class AlreadyNegated : public Error {
 public:
  explicit AlreadyNegated(const std::string& name)
      : Error("statement '" + name + "' is already a negation") {}
};

// ---- verifier -------------------------------------------------------------

// The external verifier process died or could not be started. Retriable.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

// ---- prover ---------------------------------------------------------------

class BackendError : public Error {
 public:
  BackendError(std::string message, int attempts)
      : Error(std::move(message)), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class UnknownTemplate : public Error {
 public:
  explicit UnknownTemplate(const std::string& id) : Error("unknown prompt template '" + id + "'") {}
};

class MissingPlaceholder : public Error {
 public:
  MissingPlaceholder(const std::string& id, const std::string& placeholder)
      : Error("template '" + id + "' lacks placeholder {" + placeholder + "}") {}
};

// ---- pipeline -------------------------------------------------------------

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty") {}
};

class RepairFailed : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// ---- metrics / rl ---------------------------------------------------------

class DomainError : public Error {
 public:
  using Error::Error;
};

class InsufficientPool : public Error {
 public:
  InsufficientPool(std::string pool, std::size_t needed, std::size_t available)
      : Error(pool + " pool has " + std::to_string(available) + " groups, batch needs " +
              std::to_string(needed) + " (short by " + std::to_string(needed - available) + ")"),
        pool_(std::move(pool)),
        shortfall_(needed - available) {}
  const std::string& pool() const noexcept { return pool_; }
  std::size_t shortfall() const noexcept { return shortfall_; }

 private:
  std::string pool_;
  std::size_t shortfall_;
};

class DegenerateGroup : public Error {
 public:
  using Error::Error;
};

// ---- averaging ------------------------------------------------------------

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(std::vector<std::string> names);
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
};

class KeyMismatch : public Error {
 public:
  explicit KeyMismatch(std::vector<std::string> names);
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
};

class AlphaOutOfRange : public Error {
 public:
  explicit AlphaOutOfRange(double alpha)
      : Error("alpha " + std::to_string(alpha) + " outside [0, 1]") {}
};

class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& what)
      : Error("checkpoint format error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class DigestMismatch : public Error {
 public:
  using Error::Error;
};

// ---- synthesis ------------------------------------------------------------

class ExtractionEmpty : public Error {
 public:
  ExtractionEmpty() : Error("no <newproblem> spans in reply") {}
};

class JudgeParseError : public Error {
 public:
  using Error::Error;
};

// ---- cli ------------------------------------------------------------------

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace proofsmith
