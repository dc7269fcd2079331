#ifndef RDFRONT_ERRORS_HPP
#define RDFRONT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rdfront {

/** Base class for all faults raised by the library. */
struct Fault : std::runtime_error {
    explicit Fault(const std::string& msg) : std::runtime_error(msg) {}
};

/** Invalid or inconsistent configuration (grids, time steps, schemas). */
struct ConfigFault : Fault {
    explicit ConfigFault(const std::string& msg) : Fault(msg) {}
};

/** Violated precondition or failed validation of input data. */
struct ValidationFault : Fault {
    explicit ValidationFault(const std::string& msg) : Fault(msg) {}
};

/** Numerical breakdown: divergence, failed convergence, empty brackets. */
struct NumericsFault : Fault {
    explicit NumericsFault(const std::string& msg) : Fault(msg) {}
};

/** Filesystem or serialization failure. */
struct IoFault : Fault {
    explicit IoFault(const std::string& msg) : Fault(msg) {}
};

} // namespace rdfront

#endif
