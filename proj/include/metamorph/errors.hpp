#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metamorph {

// An integration step produced a non-finite state component.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Configuration parse/validation failure; `path` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace metamorph
