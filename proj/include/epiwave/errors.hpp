#pragma once

#include <stdexcept>
#include <string>

namespace epiwave {

// Error taxonomy mirrored by the CLI exit codes:
// config -> 2, data -> 3, numeric -> 4.
enum class ErrorKind { config, data, numeric };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  static Error config(const std::string& what) { return Error(ErrorKind::config, what); }
  static Error data(const std::string& what) { return Error(ErrorKind::data, what); }
  static Error numeric(const std::string& what) { return Error(ErrorKind::numeric, what); }

private:
  ErrorKind kind_;
};

}  // namespace epiwave
