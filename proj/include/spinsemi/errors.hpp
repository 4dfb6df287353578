#ifndef SPINSEMI_ERRORS_HPP
#define SPINSEMI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spinsemi {

// Bad shapes, bad parameters, bad input files.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct DimensionError : ConfigError {
    explicit DimensionError(const std::string& what) : ConfigError(what) {}
};

// Runtime numerical failures: chart singularities, poles, caustics,
// convention mismatches between redundant evaluation routes.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularityError : NumericError {
    explicit SingularityError(const std::string& what) : NumericError(what) {}
};

struct CausticError : NumericError {
    explicit CausticError(const std::string& what) : NumericError(what) {}
};

struct ConventionError : NumericError {
    explicit ConventionError(const std::string& what) : NumericError(what) {}
};

} // namespace spinsemi

#endif
