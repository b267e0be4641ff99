#pragma once

#include <stdexcept>
#include <string>

namespace deshadow {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError / UsageError -> 1, data errors -> 2, anything else -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files.
struct IoError : Error {
    using Error::Error;
};

// Readable but structurally wrong input (multi-channel raster, bad magic, ...).
struct FormatError : Error {
    using Error::Error;
};

// Violated preconditions or invariants on otherwise well-formed data.
struct ValidationError : Error {
    using Error::Error;
};

// Bad configuration file or option combination.
struct ConfigError : Error {
    using Error::Error;
};

// Could not place non-overlapping artificial shadows within the retry budget.
struct PlacementError : Error {
    using Error::Error;
};

// Bugs: contract violations that should never happen on valid input.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace deshadow
