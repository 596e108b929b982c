#pragma once

#include <stdexcept>

namespace qwalk {

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qwalk
