#pragma once

#include <stdexcept>
#include <string>

namespace hyperorder {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DIMACS input. `clause()` is the 1-based clause number, or 0 when
/// the problem is not tied to a clause (header, trailing data).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t clause = 0)
      : Error(what), clause_(clause) {}
  std::size_t clause() const noexcept { return clause_; }

 private:
  std::size_t clause_;
};

/// A sign key reached the network that the model was not trained with.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint, dataset or order file that cannot be decoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperorder
