#pragma once

#include <stdexcept>
#include <string>

namespace embclf {

// Base of every error raised by the toolkit. The CLI maps these to exit
// status 1; anything else escaping a subcommand is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violated a documented invariant (non-finite vector, bad label,
// duplicate id, out-of-range hyperparameter).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Shapes or declared dimensions disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated binary file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Contrastive mining cannot find a positive or a negative.
class MiningError : public Error {
 public:
  using Error::Error;
};

// Empty database, empty split, or an empty training objective.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace embclf
