#pragma once

#include <stdexcept>
#include <string>

namespace fairaudit {

// Process exit codes; library errors carry the code they map to.
enum class ExitCode : int {
  ok = 0,
  failure = 1,
  schema = 2,
  data = 3,
  config = 4,
  integrity = 5,
  replication = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Missing or misdeclared columns, malformed headers.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ExitCode::schema, what) {}
};

// Unparseable cells, empty datasets, domain violations, missing words.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::data, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

// Fixture checksum mismatches and other provenance failures.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what) : Error(ExitCode::integrity, what) {}
};

}  // namespace fairaudit
