#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaborstab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// API misuse: wrong field kind, mismatched sizes, mismatched jets.
class UsageError : public Error {
public:
    using Error::Error;
};

// Input is valid but carries too little information to proceed.
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what, std::vector<std::size_t> indices = {})
        : Error(what), indices_(std::move(indices)) {}
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

private:
    std::vector<std::size_t> indices_;
};

class SingularCenterError : public DegenerateError {
public:
    using DegenerateError::DegenerateError;
};

class NoInformationError : public DegenerateError {
public:
    using DegenerateError::DegenerateError;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace gaborstab
