#pragma once

#include <stdexcept>
#include <string>

namespace tlp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A size computation would overflow the index type.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Input data could not be decoded or failed validation.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace tlp
