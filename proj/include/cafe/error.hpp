#pragma once

#include <stdexcept>
#include <string>

namespace cafe {

/// Bad user input: malformed files, invalid parameters, out-of-range indices.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A mathematical invariant the library guarantees was observed to fail.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace cafe
