// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace freqcache {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or axis mismatch between operands, or a non-divisible downsample.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation (e.g. t <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class TraceError : public Error {
 public:
  using Error::Error;
};

// Cache state used out of order (e.g. deciding before warmup completes).
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace freqcache
