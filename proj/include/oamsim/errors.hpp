#pragma once

#include <stdexcept>
#include <string>

namespace oamsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// argument outside the mathematical domain (negative p below -|m|, gamma poles, ...)
class DomainError : public Error {
public:
    using Error::Error;
};

// grid cannot represent the requested operation (aliasing, order overlap)
class SamplingError : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace oamsim
