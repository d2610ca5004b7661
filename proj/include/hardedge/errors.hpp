#pragma once

#include <stdexcept>
#include <string>

namespace hardedge {

/// Raised when a numerical procedure cannot deliver its accuracy target
/// (quadrature refinement exhausted, eigenvalue iteration did not converge,
/// truncated tail too large).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class quadrature_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

class convergence_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

}  // namespace hardedge
