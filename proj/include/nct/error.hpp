#ifndef NCT_ERROR_HPP
#define NCT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nct {

// Bad inputs: NaN, n <= 0, parameters outside a routine's domain.
class invalid_argument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A route cannot deliver a result at these parameters; the caller should
// try another one.
class reroute : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters outside the range a cross-check routine supports.
class unsupported_range : public reroute {
public:
    using reroute::reroute;
};

class evaluation_failure : public std::runtime_error {
public:
    explicit evaluation_failure(const std::string& what, double lo = 0, double hi = 0)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

class capacity_error : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace nct

#endif
