#ifndef FRACKPZ_ERRORS_HPP
#define FRACKPZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace frackpz {

// Bad inputs: parameter ranges, malformed configs, degenerate grids.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Failures during compute: singular factorizations, blow-up, non-finite values.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// File I/O failures while emitting outputs.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace frackpz

#endif
