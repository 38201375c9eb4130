// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace synclift {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Misuse of an API, e.g. backward() on a tensor with no recorded graph.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent dataset / checkpoint / config content.
class FormatError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Input values a computation cannot accept (non-finite, out of range).
class InputError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace synclift
