#pragma once

#include <stdexcept>
#include <string>

namespace ovum {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor or layer dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A value violates a documented precondition (range, distribution, class balance).
class ValueError : public Error {
public:
    using Error::Error;
};

/// Bad configuration: invalid layer chain, unknown key, unparsable file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem / serialization failure. Messages name the offending path or id.
class IoError : public Error {
public:
    using Error::Error;
};

/// A sequence model was asked to predict with the wrong head attached.
class HeadError : public Error {
public:
    using Error::Error;
};

/// Pipeline stage failure; carries the stage name so the CLI can tag its exit message.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(stage) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

} // namespace ovum
