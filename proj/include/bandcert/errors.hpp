#pragma once

#include <stdexcept>
#include <string>

namespace bandcert {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivisionByEnclosedZero : Error {
    explicit DivisionByEnclosedZero(const std::string& msg) : Error(msg) {}
};

struct DomainViolation : Error {
    explicit DomainViolation(const std::string& msg) : Error(msg) {}
};

struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& msg) : Error(msg) {}
};

struct RootIsolationFailure : Error {
    explicit RootIsolationFailure(const std::string& msg) : Error(msg) {}
};

struct ValidityViolation : Error {
    explicit ValidityViolation(const std::string& msg) : Error(msg) {}
};

struct NonConvergence : Error {
    explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

struct OddSumKey : Error {
    explicit OddSumKey(const std::string& msg) : Error(msg) {}
};

struct InvalidBandLimit : Error {
    explicit InvalidBandLimit(const std::string& msg) : Error(msg) {}
};

struct CacheCorruption : Error {
    explicit CacheCorruption(const std::string& msg) : Error(msg) {}
};

struct MissingKey : Error {
    explicit MissingKey(const std::string& msg) : Error(msg) {}
};

struct ZeroDiagonal : Error {
    explicit ZeroDiagonal(const std::string& msg) : Error(msg) {}
};

struct EigensolveFailure : Error {
    explicit EigensolveFailure(const std::string& msg) : Error(msg) {}
};

struct DegenerateFit : Error {
    explicit DegenerateFit(const std::string& msg) : Error(msg) {}
};

}  // namespace bandcert
