// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace aiva {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor extents, ranks, or axes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A public op produced NaN/Inf, or was asked to normalize a zero vector.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Bad argument or configuration value.
class ValueError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Structurally malformed input (bad magic, truncated header, bad JSON line).
class FormatError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace aiva
