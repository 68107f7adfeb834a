#pragma once

#include <stdexcept>
#include <string>

namespace lmqn {

/// Thrown when a quantity the update formulas require to be nonzero
/// (a curvature product, an SMW denominator, a factorization pivot)
/// underflows its tolerance.
class BreakdownError : public std::runtime_error {
public:
    explicit BreakdownError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lmqn
