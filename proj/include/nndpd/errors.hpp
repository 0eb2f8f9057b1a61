#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nndpd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong length, mismatched sizes, empty inputs.
class InputShapeError : public Error {
 public:
  using Error::Error;
};

// Input is well-shaped but carries no usable content (zero power, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class TrainingFailure : public Error {
 public:
  TrainingFailure(std::size_t epoch, const std::string& what)
      : Error("training diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  LoadError(const std::string& path, const std::string& field, const std::string& what)
      : Error(path + ": field '" + field + "': " + what), path_(path), field_(field) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string path_;
  std::string field_;
};

}  // namespace nndpd
