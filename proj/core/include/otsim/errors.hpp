#pragma once

#include <stdexcept>
#include <string>

namespace otsim {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments, malformed parameters, inconsistent dimensions.
struct ValidationError : Error {
  using Error::Error;
};

// A request exceeds what the implementation can enumerate or represent.
struct CapacityError : Error {
  using Error::Error;
};

// A model rule was broken (storage bounds, message ordering, ...).
struct ProtocolError : Error {
  using Error::Error;
};

// Serialized data failed structural checks (bad magic, short buffer, ...).
struct IntegrityError : Error {
  using Error::Error;
};

// Well-formed data that decrypts/decodes to garbage.
struct CorruptionError : Error {
  using Error::Error;
};

// Text input that does not parse; carries a 1-based line number.
struct ParseError : Error {
  int line;
  ParseError(const std::string& what, int line_no)
      : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

}  // namespace otsim
