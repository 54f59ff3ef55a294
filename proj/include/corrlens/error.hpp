#pragma once

#include <stdexcept>
#include <string>

namespace corrlens {

// Base for everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition or domain violation on a function argument.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Malformed or unusable input data (unparseable CSV, bad JSON-lines row, ...).
class DataError : public Error {
public:
    using Error::Error;
};

// Failure of the external model process behind the adapter protocol.
class AdapterError : public Error {
public:
    AdapterError(const std::string& what, std::string diagnostics = {})
        : Error(what), diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

}  // namespace corrlens
