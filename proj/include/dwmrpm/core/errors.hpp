#pragma once

#include <stdexcept>
#include <string>

namespace dwmrpm {

// Every library failure derives from Error so the CLI can map it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DegenerateRange : public Error {
 public:
  using Error::Error;
};

}  // namespace dwmrpm
