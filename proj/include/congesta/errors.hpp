#pragma once

#include <stdexcept>
#include <string>

namespace congesta {

/// Failure categories surfaced by the solvers. The CLI maps config to
/// exit code 3 and everything else to 4 (numerical abort).
enum class errc {
    invalid_field,
    singular_volume,
    domain_truncated,
    insufficient_capacity,
    out_of_table,
    no_curve,
    degenerate_normal,
    resolution,
    inconsistent_source,
    invalid_coefficient,
    out_of_domain,
    degenerate_endpoint,
    escape,
    config,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace congesta
