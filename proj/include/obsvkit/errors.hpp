#pragma once

#include <stdexcept>
#include <string>

namespace obsvkit {

// Camera feature at or behind the projection plane (p_z < PZ_MIN).
struct CheiralityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gibbs-vector chart left its validity region (norm reached S_MAX).
struct ChartExitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A map could not be evaluated somewhere inside a differentiation stencil.
struct JacobianDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structural check was requested on a configuration that violates its
// hypotheses (e.g. collinear features for the two-feature arguments).
struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace obsvkit
