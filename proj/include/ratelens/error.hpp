#pragma once

#include <stdexcept>
#include <string>

namespace ratelens {

// Base for every error raised by the library. Callers that only care about
// "bad input" can catch this; the CLI maps it to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// A joint distribution row carries no mass, so P(y|x) is undefined.
class ZeroRowMass : public Error {
 public:
  using Error::Error;
};

// An observed strategy or output marginal contains an exact zero; the implied
// distortion would be infinite.
class ZeroProbability : public Error {
 public:
  using Error::Error;
};

class NonNumericAlphabet : public Error {
 public:
  using Error::Error;
};

class TargetOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotSquare : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ratelens
