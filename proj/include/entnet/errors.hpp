#pragma once

#include <stdexcept>
#include <string>

namespace entnet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied a value outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A density matrix failed the physicality check required by an operation.
class UnphysicalState : public Error {
 public:
  using Error::Error;
};

/// No switch setting of a fabric can serve a routing request.
class Blocked : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure writing or reading a report file.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace entnet
