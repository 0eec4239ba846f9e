#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace poldyn {

// Invalid configuration (bad config file, bad normalization rules, bad
// query syntax at the config level). CLI maps this family to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query parse failure. Carries the byte offset of the failure and the set of
// token kinds that would have been accepted there.
class QuerySyntaxError : public std::runtime_error {
 public:
  QuerySyntaxError(std::size_t offset, std::vector<std::string> expected);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace poldyn
