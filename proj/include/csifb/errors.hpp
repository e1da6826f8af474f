#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csifb {

// Rejected argument or violated operation precondition.
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed on-disk payload. Carries the byte offset where parsing failed.
struct FormatError : std::runtime_error {
    std::size_t byte_offset = 0;
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Bitstream or frame whose length/content disagrees with its declared layout.
struct FramingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failure at runtime (e.g. diverged training loss).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace csifb
