#pragma once

#include <stdexcept>
#include <string>

namespace dce {

// Each failure class maps onto one CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class SpectrumError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class IntegrationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class FitError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

}  // namespace dce
