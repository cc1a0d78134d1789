#pragma once

#include <stdexcept>
#include <string>

namespace nlspinn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside the admissible range of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation too close to a singularity of a closed-form solution.
class PoleError : public Error {
public:
    using Error::Error;
};

class EmptyGrid : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

class NonFiniteGradient : public Error {
public:
    using Error::Error;
};

class NonUniformGrid : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nlspinn
