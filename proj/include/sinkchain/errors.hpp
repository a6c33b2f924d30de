#pragma once

#include <stdexcept>
#include <string>

namespace sinkchain {

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A state has an eigenvalue below the negativity tolerance.
struct PositivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A ChainSpec / control value is outside its allowed range. `parameter()`
// names the offending field so front ends can report it.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string parameter, const std::string& what)
      : std::invalid_argument(what), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

struct IntegratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sinkchain
