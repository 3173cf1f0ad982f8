#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NonPositiveParameter : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class PhaseCountMismatch : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class BarrierOverlap : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class StepperFailure : public Error {
public:
    using Error::Error;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

class OddStepCount : public Error {
public:
    using Error::Error;
};

class NoApproach : public Error {
public:
    using Error::Error;
};

class MissingTrajectory : public Error {
public:
    using Error::Error;
};

class CacheCorruption : public Error {
public:
    using Error::Error;
};

class IOFailure : public Error {
public:
    using Error::Error;
};

}  // namespace floquet
