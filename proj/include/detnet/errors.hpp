#pragma once

#include <stdexcept>
#include <string>

namespace detnet {

// Base class for every error raised by the controller libraries.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arrival rate exceeds the service rate, so no finite bound exists.
class ServiceOverload : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  enum class Kind {
    kDisconnectedTopology,
    kConflictingReports,
    kHostDegreeViolation,
    kInvalidLink,
    kUnknownNode,
  };

  TopologyError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class VlanExhausted : public Error {
 public:
  using Error::Error;
};

class DepthExceeded : public Error {
 public:
  using Error::Error;
};

class UnknownEndpoint : public Error {
 public:
  using Error::Error;
};

class UnknownFlow : public Error {
 public:
  using Error::Error;
};

class DuplicateFlowId : public Error {
 public:
  using Error::Error;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidScenario : public Error {
 public:
  using Error::Error;
};

}  // namespace detnet
