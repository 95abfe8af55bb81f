#pragma once

#include <stdexcept>
#include <string>

namespace topiclite {

// Base class for all library errors. Subclasses map onto CLI exit codes:
// ConfigError -> 1, DataError -> 2, IoError -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class EmptyDocument : public DataError {
 public:
  explicit EmptyDocument(const std::string& msg) : DataError(msg) {}
};

class EmptyCorpus : public DataError {
 public:
  explicit EmptyCorpus(const std::string& msg) : DataError(msg) {}
};

class CorpusTooSmall : public DataError {
 public:
  explicit CorpusTooSmall(const std::string& msg) : DataError(msg) {}
};

class DegenerateDocument : public DataError {
 public:
  explicit DegenerateDocument(const std::string& msg) : DataError(msg) {}
};

class NoScoreableTokens : public DataError {
 public:
  explicit NoScoreableTokens(const std::string& msg) : DataError(msg) {}
};

class NonAbsolutelyContinuous : public DataError {
 public:
  explicit NonAbsolutelyContinuous(const std::string& msg) : DataError(msg) {}
};

}  // namespace topiclite
