#pragma once

#include <stdexcept>
#include <string>

namespace origami {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class PatternError : public Error {
 public:
  using Error::Error;
};

/// Raised when a crease graph cannot be folded at a requested driving angle.
class FoldError : public Error {
 public:
  FoldError(const std::string& what, int vertex = -1) : Error(what), vertex_(vertex) {}
  int vertex() const noexcept { return vertex_; }

 private:
  int vertex_;
};

class EnvError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace origami
