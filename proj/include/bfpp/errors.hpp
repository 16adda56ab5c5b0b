#pragma once

#include <stdexcept>
#include <string>

namespace bfpp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
// Cross-covariance bound c'c < M violated (joint sender covariance not PD).
struct ConstraintViolated : Error {
  using Error::Error;
};
struct NonPositiveAccuracy : Error {
  using Error::Error;
};
struct NonPositiveInterval : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct EmptyData : Error {
  using Error::Error;
};
struct BadFractions : Error {
  using Error::Error;
};
struct CheckpointError : Error {
  using Error::Error;
};
struct TrainingDiverged : Error {
  using Error::Error;
};

}  // namespace bfpp
