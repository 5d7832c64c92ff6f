#pragma once

#include <stdexcept>
#include <string>

namespace ppgid {

/// Broad failure class. The CLI maps these onto exit codes 1/2/3.
enum class ErrorKind {
    usage,     // bad arguments or configuration
    data,      // unreadable, malformed or inconsistent input
    algorithm  // input was valid but the algorithm could not produce a result
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error data_error(const std::string& what) { return Error(ErrorKind::data, what); }
inline Error algorithm_error(const std::string& what) { return Error(ErrorKind::algorithm, what); }
inline Error usage_error(const std::string& what) { return Error(ErrorKind::usage, what); }

}  // namespace ppgid
