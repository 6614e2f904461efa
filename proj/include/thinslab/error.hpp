#pragma once

#include <stdexcept>
#include <string>

namespace thinslab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Field, grid or node set do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Defect charges incompatible with the degree of the boundary datum.
class IncompatibleData : public Error {
 public:
  using Error::Error;
};

/// Coincident defects or otherwise singular point configurations.
class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

/// The winding of a loop is undefined because |u| is too small on it.
class IllDefinedDegree : public Error {
 public:
  using Error::Error;
};

class InvalidPerturbation : public Error {
 public:
  using Error::Error;
};

/// The grid does not resolve the anchoring length.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

}  // namespace thinslab
