/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <stdexcept>

namespace illusion {

/// Root of the library's exception hierarchy. Everything thrown on purpose
/// derives from this, so callers can catch it as a single family.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A declared parameter range was violated (e.g. a correlation outside its
/// admissible interval). Raised while constructing a parameter object.
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Parameters are individually in range but jointly inconsistent
/// (e.g. a correlation matrix that is not positive semidefinite).
class ValidityError : public Error {
public:
    using Error::Error;
};

/// An operation was called with arguments outside its contract.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Input data make the requested quantity undefined (e.g. a correlation of a
/// constant sequence).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// An operation produced an empty or unusable result (e.g. a selection step
/// that accepts no rows).
class DegenerateOutputError : public Error {
public:
    using Error::Error;
};

/// Array dimensions disagree with what the operation requires.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An experiment configuration is malformed or self-contradictory.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// An external data file could not be turned into a dataset.
class IngestionError : public Error {
public:
    using Error::Error;
};

/// The label column of an external file does not describe a two-class
/// problem this library handles.
class UnsupportedClassError : public IngestionError {
public:
    using IngestionError::IngestionError;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace illusion
