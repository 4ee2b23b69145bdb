#pragma once

#include <stdexcept>
#include <string>

namespace fairprice {

// Invalid or inconsistent experiment configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite loss or parameter during training (CLI exit code 2).
class TrainingFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File system failure; the message always carries the offending path (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fairprice
