#ifndef SPDSIM_ERROR_HPP
#define SPDSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace spd {

/// Error category carried by every spd exception; maps 1:1 onto the
/// spd_status codes of the C API.
enum class ErrorCode {
    InvalidArgument,
    Numeric,
    Fit,
    Io,
    Config,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, what);
}
[[noreturn]] inline void throw_numeric(const std::string& what) {
    throw Error(ErrorCode::Numeric, what);
}
[[noreturn]] inline void throw_fit(const std::string& what) {
    throw Error(ErrorCode::Fit, what);
}
[[noreturn]] inline void throw_io(const std::string& what) {
    throw Error(ErrorCode::Io, what);
}
[[noreturn]] inline void throw_config(const std::string& what) {
    throw Error(ErrorCode::Config, what);
}

} // namespace spd

#endif
