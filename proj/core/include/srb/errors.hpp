#pragma once

#include <stdexcept>
#include <string>

namespace srb {

// Invalid input: bad parameters, out-of-domain arguments, malformed configs.
// The CLI maps this to exit status 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Two results that should agree by construction do not (e.g. conflicting
// classification rules). The CLI maps this to exit status 3.
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace srb
