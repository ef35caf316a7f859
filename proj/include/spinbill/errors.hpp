#pragma once

#include <stdexcept>
#include <string>

namespace spinbill {

// Eigensolver did not converge or produced a non-finite result.
class numeric_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input is well-formed but carries no information (e.g. zero variance).
class degenerate_input : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace spinbill
