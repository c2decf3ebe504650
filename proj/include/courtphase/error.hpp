#pragma once

#include <stdexcept>
#include <string>

namespace courtphase {

// Maps one-to-one onto the CLI exit codes.
enum class ErrorKind {
  Config = 2,
  Data = 3,
  Internal = 4,
};

// Every failure raised by the library carries the module that produced it so
// the pipeline can attribute errors without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

private:
  ErrorKind kind_;
  std::string module_;
};

inline Error config_error(std::string module, const std::string& message) {
  return Error(ErrorKind::Config, std::move(module), message);
}

inline Error data_error(std::string module, const std::string& message) {
  return Error(ErrorKind::Data, std::move(module), message);
}

inline Error internal_error(std::string module, const std::string& message) {
  return Error(ErrorKind::Internal, std::move(module), message);
}

}  // namespace courtphase
