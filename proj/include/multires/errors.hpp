#pragma once

#include <stdexcept>
#include <string>

namespace multires {

struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnchorNotInteriorError : GeometryError {
  using GeometryError::GeometryError;
};

struct UnsupportedDimensionError : GeometryError {
  using GeometryError::GeometryError;
};

struct EmptyPolytopeError : GeometryError {
  using GeometryError::GeometryError;
};

struct SplitError : GeometryError {
  using GeometryError::GeometryError;
};

struct ClusteringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainEscapeError : DomainError {
  using DomainError::DomainError;
};

struct SchedulingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace multires
