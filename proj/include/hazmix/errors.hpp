#ifndef HAZMIX_ERRORS_HPP
#define HAZMIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hazmix {

/// Raised when a computation cannot produce a finite, meaningful value
/// (singular special-function argument, zero total weight, rejected basis).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data (CSV rows, nonpositive times, bad flags).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hazmix

#endif  // HAZMIX_ERRORS_HPP
