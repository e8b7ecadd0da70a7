#ifndef SLFS_ERRORS_HPP
#define SLFS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slfs {

/// Bad input data: unreadable file, missing class column, ragged rows, empty table.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration values (lambda <= 0, max_depth < 1, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Violated tree precondition: duplicate child, unknown parent, capacity overflow.
class TbnError : public std::logic_error {
 public:
  explicit TbnError(const std::string& what) : std::logic_error(what) {}
};

/// Model applied to data whose columns do not match the training schema.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slfs

#endif  // SLFS_ERRORS_HPP
