#pragma once

#include <stdexcept>
#include <string>

namespace glmvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a link or loss (non-finite z, u <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two-sided derivative requested at a point where the link has a kink.
class KinkError : public Error {
 public:
  KinkError(const std::string& what, double location)
      : Error(what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class NotConvergedError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Malformed link/family/schedule/grid specification.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace glmvi
