#pragma once

#include <stdexcept>
#include <string>

namespace rkwave {

/// Base class for every error raised by the library. `exit_code()` is the
/// process status the command-line tool reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 2; }
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownScheme : public Error {
 public:
  using Error::Error;
};

/// A zero polynomial coefficient makes the low-storage recurrence undefined.
class ZeroCoefficient : public Error {
 public:
  using Error::Error;
};

class UndefinedAtZero : public Error {
 public:
  using Error::Error;
};

/// r(z) == 0, so log r (and any root of r) is undefined.
class DegenerateAmplification : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class GridError : public Error {
 public:
  using Error::Error;
};

class DegenerateRegion : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedProblem : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 4; }
};

}  // namespace rkwave
