#pragma once

#include <stdexcept>
#include <string>

namespace lagflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

// Quantity requires at least two eigenvalues (pairs i < j).
class UndefinedForDimension : public Error {
 public:
  using Error::Error;
};

// Lewy rotation pushed an angle onto +-pi/2; the rotated graph is not graphical.
class PoleError : public Error {
 public:
  using Error::Error;
};

class InvalidFrame : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class NanBlowup : public Error {
 public:
  using Error::Error;
};

}  // namespace lagflow
