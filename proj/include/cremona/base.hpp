#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cremona {

using Int = long long;

// Malformed or inconsistent input data. CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A broken internal invariant (a bug, not bad input). CLI maps this to exit code 1.
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

inline Int checked_add(Int a, Int b) {
    Int r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw InternalError("integer overflow in addition");
    return r;
}

inline Int checked_mul(Int a, Int b) {
    Int r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw InternalError("integer overflow in multiplication");
    return r;
}

} // namespace cremona
