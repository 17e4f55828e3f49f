#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "obsvkit/constants.hpp"
#include "obsvkit/lie.hpp"
#include "obsvkit/state.hpp"

namespace obsvkit {

// The state-dependent unobservable direction: a simultaneous rotation of
// attitude, velocity, and all positions about the gravity axis.
Eigen::VectorXd gravity_rotation_direction(const State& st, const Gravity& gravity = {});

// Same direction with the velocity block sign-flipped; a control that the
// bracket checks reject non-symmetries.
Eigen::VectorXd corrupted_direction(const State& st, const Gravity& gravity = {});

// Round trip of a vector through the chart-rate map and its inverse; exact
// cancellation certifies the closed-form inverse used throughout.
double chart_rate_roundtrip(const Eigen::Vector3d& s, const Eigen::Vector3d& u);

// Max over the drift and control fields of the scaled bracket residual
// ||[f, d]|| / (1 + ||x||) against an arbitrary direction field.
double max_bracket_residual(const State& st, const VectorField& direction,
                            const Gravity& gravity = {});

struct BracketCheck {
  std::string field;
  double residual{0.0};
  bool pass{false};
};

struct BracketReport {
  std::vector<BracketCheck> checks;  // one per system field, plus translations
  double mutation_residual{0.0};     // same residual for the corrupted direction
  double tol{0.0};
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Brackets of every system field with the unobservable directions vanish up
// to differentiation noise; the corrupted direction must fail by a wide
// margin for the report to be trustworthy.
BracketReport verify_brackets(const State& st, double tol = kBracketTol,
                              const Gravity& gravity = {});

struct FlowInvarianceReport {
  double gap{0.0};  // principal angle between pushed and recomputed spans
  double direction_residual{0.0};  // relative error of the pushed rotation direction
  double dt{0.0};
  double duration{0.0};
  bool pass{false};
};

// Pushes the unobservable directions through the variational flow and
// measures the angle to the directions recomputed at the endpoint; the span
// is carried onto itself when the directions are genuine symmetries.
FlowInvarianceReport verify_flow_invariance(const State& st, const InputSchedule& schedule,
                                            double dt, DfBackend backend = DfBackend::kForwardAd,
                                            double tol = kGapTol, const Gravity& gravity = {});

}  // namespace obsvkit
