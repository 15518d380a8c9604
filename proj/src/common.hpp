#pragma once

#include <stdexcept>
#include <string>

namespace nlift {

// Error hierarchy. Everything user-facing derives from Error so the C API
// boundary can map any failure to a status code plus message.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct UnknownPreamble : ParseError { using ParseError::ParseError; };
struct TruncatedFile : ParseError { using ParseError::ParseError; };
struct TableSizeMismatch : ParseError { using ParseError::ParseError; };
struct IndexOutOfRange : ParseError { using ParseError::ParseError; };
struct SchemaError : ParseError { using ParseError::ParseError; };
struct UnknownState : ParseError { using ParseError::ParseError; };

struct NonPositivePotential : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct HighOrderUnsupported : Error { using Error::Error; };
struct InvalidRho : Error { using Error::Error; };
struct NonPositiveTemperature : Error { using Error::Error; };
struct NonScalarLoss : Error { using Error::Error; };
struct DegenerateTopology : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace nlift
