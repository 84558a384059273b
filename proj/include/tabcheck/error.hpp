#pragma once

#include <stdexcept>
#include <string>

namespace tabcheck {

/// Base for every error the engine raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition of a kernel.
class ContractError : public Error {
public:
    using Error::Error;
};

/// A kernel's input is well-formed but too thin to compute on (e.g. a
/// class with no reference points).
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Input data could not be loaded (CSV, predictions file).
class LoadError : public Error {
public:
    using Error::Error;
};

/// The external predict command failed.
class AdapterError : public Error {
public:
    AdapterError(const std::string& what, std::string stderr_text = {})
        : Error(what), stderr_text_(std::move(stderr_text)) {}

    const std::string& stderr_text() const noexcept { return stderr_text_; }

private:
    std::string stderr_text_;
};

/// Invalid configuration file, unknown check/suite, bad parameter.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Thrown from inside a check when a declared requirement turns out unmet
/// only after looking at the data (e.g. no numeric features). The framework
/// turns it into a Skipped result.
class SkipCheck : public Error {
public:
    using Error::Error;
};

}  // namespace tabcheck
