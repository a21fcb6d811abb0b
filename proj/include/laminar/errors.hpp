#pragma once

#include <stdexcept>
#include <string>

namespace laminar {

/// Precondition or argument outside the operation's domain.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An exhaustive computation would exceed its configured cap.
class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed model file or document.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A structure failed an axiom check (forest, certificate, ...).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace laminar
