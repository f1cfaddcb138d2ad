#ifndef WCOH_ERROR_HPP
#define WCOH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wcoh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a precondition (bad file, degenerate series, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Caller passed an invalid argument or configuration value.
class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw UsageError(msg);
}

inline void require_data(bool cond, const std::string& msg)
{
    if (!cond) throw DataError(msg);
}

} // namespace detail
} // namespace wcoh

#endif // WCOH_ERROR_HPP
