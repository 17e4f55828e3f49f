#include "obsvkit/ocvins.hpp"

#include <utility>

#include "obsvkit/dynamics.hpp"
#include "obsvkit/geometry.hpp"
#include "obsvkit/observability.hpp"

namespace obsvkit {

Eigen::VectorXd gravity_rotation_direction(const State& st, const Gravity& gravity) {
  return theoretical_null_basis(st, gravity).col(3);
}

Eigen::VectorXd corrupted_direction(const State& st, const Gravity& gravity) {
  Eigen::VectorXd d = gravity_rotation_direction(st, gravity);
  d.segment<3>(6) *= -1.0;
  return d;
}

double chart_rate_roundtrip(const Eigen::Vector3d& s, const Eigen::Vector3d& u) {
  return (gibbs_rate_inverse(s) * (gibbs_rate(s) * u) - u).norm();
}

namespace {

std::vector<std::pair<std::string, VectorField>> system_fields(const Gravity& gravity) {
  std::vector<std::pair<std::string, VectorField>> fields;
  fields.emplace_back("f0",
                      [gravity](const Eigen::VectorXd& x) { return drift_field(x, gravity); });
  for (int i = 0; i < 3; ++i) {
    fields.emplace_back("f1_" + std::to_string(i + 1),
                        [i](const Eigen::VectorXd& x) { return gyro_field(x, i); });
    fields.emplace_back("f2_" + std::to_string(i + 1),
                        [i](const Eigen::VectorXd& x) { return accel_field(x, i); });
  }
  return fields;
}

}  // namespace

double max_bracket_residual(const State& st, const VectorField& direction,
                            const Gravity& gravity) {
  const Eigen::VectorXd x = st.flatten();
  const double scale = 1.0 + x.norm();
  double worst = 0.0;
  for (const auto& [name, field] : system_fields(gravity)) {
    worst = std::max(worst, lie_bracket(field, direction, x).norm() / scale);
  }
  return worst;
}

BracketReport verify_brackets(const State& st, double tol, const Gravity& gravity) {
  BracketReport rep;
  rep.tol = tol;
  const Eigen::VectorXd x = st.flatten();
  const double scale = 1.0 + x.norm();
  const int nf = st.num_features();

  const VectorField rotation = [gravity](const Eigen::VectorXd& y) {
    return gravity_rotation_direction(State::unflatten(y), gravity);
  };
  for (const auto& [name, field] : system_fields(gravity)) {
    const double r = lie_bracket(field, rotation, x).norm() / scale;
    rep.checks.push_back({name, r, r <= tol});
  }

  double translation_worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    const VectorField tj = [j, nf](const Eigen::VectorXd& y) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(y.size());
      d[12 + j] = 1.0;
      for (int i = 0; i < nf; ++i) d[15 + 3 * i + j] = 1.0;
      return d;
    };
    for (const auto& [name, field] : system_fields(gravity)) {
      translation_worst = std::max(translation_worst, lie_bracket(field, tj, x).norm() / scale);
    }
  }
  rep.checks.push_back({"translations", translation_worst, translation_worst <= tol});

  const VectorField bad = [gravity](const Eigen::VectorXd& y) {
    return corrupted_direction(State::unflatten(y), gravity);
  };
  rep.mutation_residual = max_bracket_residual(st, bad, gravity);
  return rep;
}

FlowInvarianceReport verify_flow_invariance(const State& st, const InputSchedule& schedule,
                                            double dt, DfBackend backend, double tol,
                                            const Gravity& gravity) {
  const Eigen::VectorXd x0 = st.flatten();
  const FlowWithJacobian fj = flow_jacobian(x0, schedule, dt, backend, gravity);
  const State end_state = State::unflatten(fj.x);

  const Eigen::MatrixXd pushed = fj.M * theoretical_null_basis(st, gravity);
  const Eigen::MatrixXd recomputed = theoretical_null_basis(end_state, gravity);

  FlowInvarianceReport rep;
  rep.gap = subspace_gap(pushed, recomputed);
  const Eigen::VectorXd lhs = fj.M * gravity_rotation_direction(st, gravity);
  const Eigen::VectorXd rhs = gravity_rotation_direction(end_state, gravity);
  rep.direction_residual = (lhs - rhs).norm() / rhs.norm();
  rep.dt = dt;
  rep.duration = schedule.total_duration();
  rep.pass = rep.gap <= tol;
  return rep;
}

}  // namespace obsvkit
