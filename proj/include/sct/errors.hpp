/*
 * Copyright 2026 The SCT Authors
 *
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

#pragma once

#include <stdexcept>
#include <string>

namespace sct {

// Base of every error raised by the library. Callers that only need a
// diagnostic can catch this; the subclasses exist so tests and the CLI can
// tell the failure modes apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class FitDegenerateError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class EmptyEnvironmentError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class DegenerateTrainingError : public Error {
 public:
  using Error::Error;
};

class DegenerateEvaluationError : public Error {
 public:
  using Error::Error;
};

class UndefinedGainError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sct
