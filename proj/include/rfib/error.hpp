/*
 * Copyright 2026 The RFIB Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RFIB_ERROR_HPP_
#define RFIB_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfib {

// Base of every error raised by the library. The CLI maps subclasses to
// process exit codes through exit_code().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 1; }
};

// Exit code 2: configuration / validity problems.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

class DimensionMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class LengthMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NonPositiveVariance : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Raised when alpha > 1 and some variance reaches alpha*gamma2/(alpha-1).
class ValidityViolation : public ConfigError {
 public:
  ValidityViolation(const std::string& what, double bound)
      : ConfigError(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

class InvalidSpec : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class LambdaOutOfRange : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class UndefinedIta : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Exit code 3: I/O and file-format problems.
class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : IoError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NonBinaryLabel : public ParseError {
 public:
  using ParseError::ParseError;
};

class FormatError : public IoError {
 public:
  using IoError::IoError;
};

// Exit code 4: numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 4; }
};

class NonFiniteActivation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureNonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteLoss : public NumericalError {
 public:
  NonFiniteLoss(std::size_t epoch, std::size_t batch)
      : NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                       ", batch " + std::to_string(batch)),
        epoch_(epoch),
        batch_(batch) {}
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

// Exit code 5: evaluation / data preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 5; }
};

class EmptyDataset : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class SingleClassTraining : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class MissingSubgroup : public PreconditionError {
 public:
  MissingSubgroup(const std::string& what, int s)
      : PreconditionError(what), s_(s) {}
  int s() const { return s_; }

 private:
  int s_;
};

class MissingSubgroupCell : public MissingSubgroup {
 public:
  MissingSubgroupCell(int y, int s)
      : MissingSubgroup("no records in cell (y=" + std::to_string(y) +
                            ", s=" + std::to_string(s) + ")",
                        s),
        y_(y) {}
  int y() const { return y_; }

 private:
  int y_;
};

}  // namespace rfib

#endif  // RFIB_ERROR_HPP_
