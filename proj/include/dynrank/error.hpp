#pragma once
#include <stdexcept>
#include <string>

namespace dynrank {

// Input file could not be read.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input content (carries file/line context in the message).
struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// A precondition of an operation was violated by the caller.
struct contract_error : std::logic_error {
  explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

// Randomized generation could not satisfy its constraints.
struct generation_error : std::runtime_error {
  explicit generation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dynrank
