#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace helpann {

/// Root of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied an invalid argument (bad size, out-of-range parameter).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `offset` is the byte offset (or line number for
/// text formats) where decoding failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Raw attribute label absent from its dimension's dictionary.
class MappingError : public Error {
public:
    using Error::Error;
};

/// A requested constraint could not be met (query generation, quality target).
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Alpha calibration impossible, e.g. every sampled feature distance is zero.
class CalibrationError : public ConstraintError {
public:
    using ConstraintError::ConstraintError;
};

/// Build parameters incompatible with the dataset (e.g. n <= gamma).
class BuildError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

}  // namespace helpann
