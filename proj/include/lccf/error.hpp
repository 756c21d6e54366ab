#pragma once

#include <stdexcept>
#include <string>

namespace lccf {

// Three failure families; the CLI maps them to exit codes 2, 3 and 4.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lccf
