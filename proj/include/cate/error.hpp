#pragma once

#include <stdexcept>
#include <string>

namespace cate {

// Input or contract violation; the CLI maps this to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value produced during training; the CLI maps this to exit code 2.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace cate
