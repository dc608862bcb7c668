#pragma once

#include <stdexcept>
#include <string>

namespace hywave {

// Error categories map onto process exit codes at the CLI boundary:
//   config/schema/validation/io -> 2, numeric/simulation -> 3, missing_artifact -> 4.
enum class errc {
    config,           // bad or inconsistent run configuration
    schema,           // malformed input file (JSON/CSV shape, units, monotonicity)
    validation,       // physical invariant violated (negative damping, asymmetry, ...)
    io,               // file unreadable/unwritable
    numeric,          // solver failed to converge / produced NaN outside time stepping
    simulation,       // time-domain divergence
    missing_artifact, // a referenced data file does not exist
};

class Error : public std::runtime_error {
public:
    Error(errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    errc kind() const { return kind_; }

private:
    errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& msg) { throw Error(kind, msg); }

inline const char* to_string(errc kind) {
    switch (kind) {
    case errc::config: return "config";
    case errc::schema: return "schema";
    case errc::validation: return "validation";
    case errc::io: return "io";
    case errc::numeric: return "numeric";
    case errc::simulation: return "simulation";
    case errc::missing_artifact: return "missing_artifact";
    }
    return "unknown";
}

inline int exit_code_for(errc kind) {
    switch (kind) {
    case errc::config:
    case errc::schema:
    case errc::validation:
    case errc::io: return 2;
    case errc::numeric:
    case errc::simulation: return 3;
    case errc::missing_artifact: return 4;
    }
    return 1;
}

} // namespace hywave
