#pragma once

#include <stdexcept>
#include <string>

namespace hemd {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct EmptyError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct LabelOverflowError : Error { using Error::Error; };
struct OverlapError : Error { using Error::Error; };
struct UnknownNodeError : Error { using Error::Error; };
struct TooLargeError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct DisjointnessError : Error { using Error::Error; };

}  // namespace hemd
