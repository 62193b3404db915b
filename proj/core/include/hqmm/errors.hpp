/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_ERRORS_HPP
#define HQMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hqmm {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "error"; }
};

// Shape or size mismatch between operands.
class DimensionError : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "dimension_error"; }
};

// A model or matrix violates one of its structural invariants.
class ValidityError : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "validity_error"; }
};

// A candidate OOM assigned a probability below the negative tolerance.
class NppViolationError : public ValidityError {
public:
  using ValidityError::ValidityError;
  const char *kind() const noexcept override { return "npp_violation"; }
};

// A filtering normalizer fell below the underflow floor. Carries enough
// context to identify the offending step; fields are -1 when unknown.
class ZeroProbabilityError : public Error {
public:
  ZeroProbabilityError(const std::string &msg, int symbol = -1,
                       long position = -1, long sequence_index = -1)
      : Error(msg), symbol(symbol), position(position),
        sequence_index(sequence_index) {}
  const char *kind() const noexcept override { return "zero_probability"; }

  int symbol;
  long position;
  long sequence_index;
};

// A gradient step could not be applied (ill-conditioned retraction system
// or rank-deficient projection); callers typically retry with a smaller
// step size.
class StepError : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "step_error"; }
};

// The similarity transform to standard-OOM form is singular.
class TransformError : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "transform_error"; }
};

// An enumeration guard or other resource limit was exceeded.
class ResourceError : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "resource_error"; }
};

class InputError : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "input_error"; }
};

// Malformed text input; line is 1-based, 0 when unknown.
class ParseError : public InputError {
public:
  ParseError(const std::string &msg, long line = 0)
      : InputError(msg), line(line) {}
  const char *kind() const noexcept override { return "parse_error"; }

  long line;
};

class ConfigError : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "config_error"; }
};

} // namespace hqmm

#endif
