#pragma once

#include <stdexcept>
#include <string>

namespace planarmvs {

// Base class for all library errors.  CLI maps these to exit code 2
// (bad input / bad config) unless noted otherwise.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed or unreadable input file (image, camera, depth map, PLY, scene).
class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error(what) {}
};

// Structurally valid input with out-of-contract values (bad intrinsics,
// depth range, image/camera count mismatch, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &what) : Error(what) {}
};

// Bad key, value, or syntax in a key=value config file or CLI flag.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what) : Error(what) {}
};

// Too little data to build a planar prior (fewer than 3 credible pixels, or
// all of them collinear).  The pipeline falls back to running without one.
class InsufficientSupportError : public Error {
 public:
  explicit InsufficientSupportError(const std::string &what) : Error(what) {}
};

// Internal invariant violation; CLI maps this to exit code 3.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string &what) : Error(what) {}
};

}  // namespace planarmvs
