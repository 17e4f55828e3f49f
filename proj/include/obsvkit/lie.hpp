#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "obsvkit/constants.hpp"
#include "obsvkit/detail/flat_model.hpp"
#include "obsvkit/state.hpp"

namespace obsvkit {

// Generic smooth map R^n -> R^m; out_dim lets callers size Jacobians without
// evaluating first.
struct SmoothMap {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  int out_dim{0};
};

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central-difference Jacobian with a per-coordinate step scaled by the
// coordinate magnitude. Domain errors raised by the map at a probe point are
// rethrown as JacobianDomainError naming the coordinate.
Eigen::MatrixXd numeric_jacobian(const SmoothMap& map, const Eigen::VectorXd& x,
                                 double step = kFdStep);

// Fourth-order central-difference Jacobian; used as an independent oracle for
// the second-order one and for bracket residual estimates.
Eigen::MatrixXd numeric_jacobian_order4(const SmoothMap& map, const Eigen::VectorXd& x,
                                        double step = kFdStep);

// Directional derivative of h along f at x, via numeric differentiation.
Eigen::VectorXd lie_derivative(const SmoothMap& h, const VectorField& f,
                               const Eigen::VectorXd& x, double step = kFdStep);

// Lie bracket [f, g](x) = Dg(x) f(x) - Df(x) g(x).
Eigen::VectorXd lie_bracket(const VectorField& f, const VectorField& g,
                            const Eigen::VectorXd& x, double step = kFdStep);
Eigen::VectorXd lie_bracket_order4(const VectorField& f, const VectorField& g,
                                   const Eigen::VectorXd& x, double step = kFdStep);

// Piecewise-constant input profile for the flow integrator.
struct InputSegment {
  Eigen::Vector3d omega{Eigen::Vector3d::Zero()};
  Eigen::Vector3d accel{Eigen::Vector3d::Zero()};
  double duration{0.0};
};

struct InputSchedule {
  std::vector<InputSegment> segments;
  double total_duration() const {
    double t = 0.0;
    for (const auto& seg : segments) t += seg.duration;
    return t;
  }
};

// Fixed-step RK4 flow of the control-affine system under the given schedule.
// Steps are aligned to segment boundaries, with a shortened final step per
// segment. Throws ChartExitError if the attitude chart leaves its safe region.
Eigen::VectorXd flow(const Eigen::VectorXd& x0, const InputSchedule& schedule, double dt,
                     const Gravity& gravity = {});

// Backend for the state Jacobian of the vector field inside the variational
// integrator: plain central differences, or exact forward-mode evaluation.
enum class DfBackend { kCentralFd, kForwardAd };

struct FlowWithJacobian {
  Eigen::VectorXd x;   // flowed state
  Eigen::MatrixXd M;   // sensitivity of the flowed state to the initial state
};

// Integrates the variational equation alongside the flow with the same RK4
// stages, so M approximates the flow Jacobian to the integrator's order.
FlowWithJacobian flow_jacobian(const Eigen::VectorXd& x0, const InputSchedule& schedule,
                               double dt, DfBackend backend = DfBackend::kForwardAd,
                               const Gravity& gravity = {});

// A word of vector fields, outermost derivative first: {w0, w1, ..., wk}
// denotes L_w0 L_w1 ... L_wk h.
using LieWord = std::vector<detail::FieldId>;

std::string field_name(const detail::FieldId& id);
std::string word_name(const LieWord& word);

// Iterated Lie derivative of the observation along `word`, evaluated exactly
// with nested dual numbers (no truncation error); supports words up to
// length 3.
Eigen::VectorXd exact_lie_value(const detail::ObsSpec& spec, const LieWord& word,
                                const Eigen::VectorXd& x, const Gravity& gravity = {});

// Gradient of the iterated Lie derivative with respect to the state, one
// extra dual level on top of the value recursion. Rows of the observability
// matrix come from here.
Eigen::MatrixXd exact_lie_row(const detail::ObsSpec& spec, const LieWord& word,
                              const Eigen::VectorXd& x, const Gravity& gravity = {});

// Same quantities built by composing central-difference gradients, the
// simplest possible construction. Noise grows rapidly with word length; kept
// as a cross-check at depth <= 1 and to document why the exact path exists.
Eigen::VectorXd fd_lie_value(const detail::ObsSpec& spec, const LieWord& word,
                             const Eigen::VectorXd& x, const Gravity& gravity = {},
                             double step = kFdStep);
Eigen::MatrixXd fd_lie_row(const detail::ObsSpec& spec, const LieWord& word,
                           const Eigen::VectorXd& x, const Gravity& gravity = {},
                           double step = kFdStep);

}  // namespace obsvkit
