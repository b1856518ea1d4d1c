#pragma once

#include <stdexcept>
#include <string>

namespace sgid {

/// Malformed or inconsistent input data (bad records, missing ids, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition (bad sizes, bad config).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sgid
