#pragma once

#include <stdexcept>
#include <string>

namespace cpsa {

// Invalid scenario, constellation or GA parameters. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed region map input; message carries the offending row number.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brute-force enumeration refused because the instance is too large.
class OracleSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpsa
