#include "obsvkit/lie.hpp"

#include <cmath>
#include <stdexcept>

#include "obsvkit/dynamics.hpp"
#include "obsvkit/errors.hpp"

namespace obsvkit {

namespace {

detail::Vec3<double> gvec(const Gravity& gravity) {
  return {gravity.g.x(), gravity.g.y(), gravity.g.z()};
}

Eigen::VectorXd probe(const SmoothMap& map, const Eigen::VectorXd& x, int coord) {
  try {
    return map.eval(x);
  } catch (const CheiralityError& e) {
    throw JacobianDomainError("probe along coordinate " + std::to_string(coord) +
                              " left the model domain: " + e.what());
  } catch (const ChartExitError& e) {
    throw JacobianDomainError("probe along coordinate " + std::to_string(coord) +
                              " left the model domain: " + e.what());
  }
}

}  // namespace

Eigen::MatrixXd numeric_jacobian(const SmoothMap& map, const Eigen::VectorXd& x, double step) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd jac(map.out_dim, n);
  for (int j = 0; j < n; ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (probe(map, xp, j) - probe(map, xm, j)) / (2.0 * h);
  }
  return jac;
}

Eigen::MatrixXd numeric_jacobian_order4(const SmoothMap& map, const Eigen::VectorXd& x,
                                        double step) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd jac(map.out_dim, n);
  for (int j = 0; j < n; ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd x1 = x, x2 = x, x3 = x, x4 = x;
    x1[j] += 2.0 * h;
    x2[j] += h;
    x3[j] -= h;
    x4[j] -= 2.0 * h;
    jac.col(j) = (-probe(map, x1, j) + 8.0 * probe(map, x2, j) - 8.0 * probe(map, x3, j) +
                  probe(map, x4, j)) /
                 (12.0 * h);
  }
  return jac;
}

Eigen::VectorXd lie_derivative(const SmoothMap& h, const VectorField& f,
                               const Eigen::VectorXd& x, double step) {
  return numeric_jacobian(h, x, step) * f(x);
}

namespace {

SmoothMap as_map(const VectorField& f, int dim) {
  return {[f](const Eigen::VectorXd& y) { return f(y); }, dim};
}

}  // namespace

Eigen::VectorXd lie_bracket(const VectorField& f, const VectorField& g,
                            const Eigen::VectorXd& x, double step) {
  const int n = static_cast<int>(x.size());
  return numeric_jacobian(as_map(g, n), x, step) * f(x) -
         numeric_jacobian(as_map(f, n), x, step) * g(x);
}

Eigen::VectorXd lie_bracket_order4(const VectorField& f, const VectorField& g,
                                   const Eigen::VectorXd& x, double step) {
  const int n = static_cast<int>(x.size());
  return numeric_jacobian_order4(as_map(g, n), x, step) * f(x) -
         numeric_jacobian_order4(as_map(f, n), x, step) * g(x);
}

namespace {

void check_chart(const Eigen::VectorXd& x) {
  const double sn = x.segment<3>(0).norm();
  if (sn >= kSMax) {
    throw ChartExitError("attitude chart coordinate norm " + std::to_string(sn) +
                         " reached the safe limit " + std::to_string(kSMax));
  }
}

Eigen::VectorXd rk4_step(const Eigen::VectorXd& x, const Eigen::Vector3d& omega,
                         const Eigen::Vector3d& accel, double dt, const Gravity& gravity) {
  const Eigen::VectorXd k1 = full_field(x, omega, accel, gravity);
  const Eigen::VectorXd k2 = full_field(x + 0.5 * dt * k1, omega, accel, gravity);
  const Eigen::VectorXd k3 = full_field(x + 0.5 * dt * k2, omega, accel, gravity);
  const Eigen::VectorXd k4 = full_field(x + dt * k3, omega, accel, gravity);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Steps per segment: whole steps of dt plus one shortened remainder step, so
// halving dt refines the same grid.
template <typename StepFn>
void walk_schedule(const InputSchedule& schedule, double dt, const StepFn& take_step) {
  if (dt <= 0.0) throw InvalidConfig("integrator step must be positive");
  for (const auto& seg : schedule.segments) {
    if (seg.duration < 0.0) throw InvalidConfig("segment duration must be nonnegative");
    const auto nsteps = static_cast<long>(std::floor(seg.duration / dt + 1e-9));
    for (long i = 0; i < nsteps; ++i) take_step(seg, dt);
    const double rem = seg.duration - static_cast<double>(nsteps) * dt;
    if (rem > 1e-12) take_step(seg, rem);
  }
}

template <typename T>
std::vector<T> full_field_eval(const std::vector<T>& x, const Eigen::Vector3d& omega,
                               const Eigen::Vector3d& accel, const detail::Vec3<double>& g) {
  std::vector<T> f = detail::field_eval<T>({detail::FieldKind::kDrift, 0}, x, g);
  for (int i = 0; i < 3; ++i) {
    if (omega[i] != 0.0) {
      auto fi = detail::field_eval<T>({detail::FieldKind::kGyro, i}, x, g);
      for (std::size_t k = 0; k < f.size(); ++k) f[k] += omega[i] * fi[k];
    }
    if (accel[i] != 0.0) {
      auto fi = detail::field_eval<T>({detail::FieldKind::kAccel, i}, x, g);
      for (std::size_t k = 0; k < f.size(); ++k) f[k] += accel[i] * fi[k];
    }
  }
  return f;
}

Eigen::MatrixXd field_state_jacobian(const Eigen::VectorXd& x, const Eigen::Vector3d& omega,
                                     const Eigen::Vector3d& accel, DfBackend backend,
                                     const Gravity& gravity) {
  const int n = static_cast<int>(x.size());
  if (backend == DfBackend::kCentralFd) {
    SmoothMap m{[&](const Eigen::VectorXd& y) { return full_field(y, omega, accel, gravity); },
                n};
    return numeric_jacobian(m, x);
  }
  Eigen::MatrixXd df(n, n);
  const std::vector<double> xs = detail::to_std(x);
  const detail::Vec3<double> g = gvec(gravity);
  std::vector<double> dir(xs.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    dir[j] = 1.0;
    auto fd = full_field_eval(detail::lift_state(xs, dir), omega, accel, g);
    for (int i = 0; i < n; ++i) df(i, j) = fd[i].du;
    dir[j] = 0.0;
  }
  return df;
}

}  // namespace

Eigen::VectorXd flow(const Eigen::VectorXd& x0, const InputSchedule& schedule, double dt,
                     const Gravity& gravity) {
  Eigen::VectorXd x = x0;
  check_chart(x);
  walk_schedule(schedule, dt, [&](const InputSegment& seg, double h) {
    x = rk4_step(x, seg.omega, seg.accel, h, gravity);
    check_chart(x);
  });
  return x;
}

FlowWithJacobian flow_jacobian(const Eigen::VectorXd& x0, const InputSchedule& schedule,
                               double dt, DfBackend backend, const Gravity& gravity) {
  const int n = static_cast<int>(x0.size());
  FlowWithJacobian out{x0, Eigen::MatrixXd::Identity(n, n)};
  check_chart(out.x);
  walk_schedule(schedule, dt, [&](const InputSegment& seg, double h) {
    const auto f = [&](const Eigen::VectorXd& y) {
      return full_field(y, seg.omega, seg.accel, gravity);
    };
    const auto df = [&](const Eigen::VectorXd& y) {
      return field_state_jacobian(y, seg.omega, seg.accel, backend, gravity);
    };
    const Eigen::VectorXd k1 = f(out.x);
    const Eigen::MatrixXd a1 = df(out.x) * out.M;
    const Eigen::VectorXd x2 = out.x + 0.5 * h * k1;
    const Eigen::VectorXd k2 = f(x2);
    const Eigen::MatrixXd a2 = df(x2) * (out.M + 0.5 * h * a1);
    const Eigen::VectorXd x3 = out.x + 0.5 * h * k2;
    const Eigen::VectorXd k3 = f(x3);
    const Eigen::MatrixXd a3 = df(x3) * (out.M + 0.5 * h * a2);
    const Eigen::VectorXd x4 = out.x + h * k3;
    const Eigen::VectorXd k4 = f(x4);
    const Eigen::MatrixXd a4 = df(x4) * (out.M + h * a3);
    out.x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.M += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    check_chart(out.x);
  });
  return out;
}

std::string field_name(const detail::FieldId& id) {
  switch (id.kind) {
    case detail::FieldKind::kDrift:
      return "f0";
    case detail::FieldKind::kGyro:
      return "f1_" + std::to_string(id.axis + 1);
    case detail::FieldKind::kAccel:
      return "f2_" + std::to_string(id.axis + 1);
  }
  return "?";
}

std::string word_name(const LieWord& word) {
  if (word.empty()) return "h";
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += '.';
    out += field_name(word[i]);
  }
  return out;
}

namespace {

constexpr int kMaxWordLen = 3;

template <int Cap, typename T>
std::vector<T> tower_value(const detail::ObsSpec& spec, const detail::FieldId* word, int len,
                           const std::vector<T>& x, const detail::Vec3<double>& g) {
  if (len == 0) return detail::obs_eval(spec, x);
  if constexpr (Cap <= 0) {
    throw std::logic_error("lie word longer than the supported depth");
  } else {
    auto fx = detail::field_eval(*word, x, g);
    auto lifted = detail::lift_state(x, fx);
    return detail::dual_parts(tower_value<Cap - 1>(spec, word + 1, len - 1, lifted, g));
  }
}

void require_word_fits(const LieWord& word) {
  if (static_cast<int>(word.size()) > kMaxWordLen) {
    throw std::logic_error("lie word '" + word_name(word) + "' longer than the supported depth");
  }
}

}  // namespace

Eigen::VectorXd exact_lie_value(const detail::ObsSpec& spec, const LieWord& word,
                                const Eigen::VectorXd& x, const Gravity& gravity) {
  require_word_fits(word);
  auto v = tower_value<kMaxWordLen>(spec, word.data(), static_cast<int>(word.size()),
                                    detail::to_std(x), gvec(gravity));
  return detail::to_eigen(v);
}

Eigen::MatrixXd exact_lie_row(const detail::ObsSpec& spec, const LieWord& word,
                              const Eigen::VectorXd& x, const Gravity& gravity) {
  require_word_fits(word);
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd row(spec.out_dim(), n);
  const std::vector<double> xs = detail::to_std(x);
  const detail::Vec3<double> g = gvec(gravity);
  std::vector<double> dir(xs.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    dir[j] = 1.0;
    auto v = tower_value<kMaxWordLen>(spec, word.data(), static_cast<int>(word.size()),
                                      detail::lift_state(xs, dir), g);
    for (int i = 0; i < row.rows(); ++i) row(i, j) = v[static_cast<std::size_t>(i)].du;
    dir[j] = 0.0;
  }
  return row;
}

namespace {

SmoothMap obs_map(const detail::ObsSpec& spec) {
  return {[spec](const Eigen::VectorXd& y) {
            return detail::to_eigen(detail::obs_eval(spec, detail::to_std(y)));
          },
          spec.out_dim()};
}

SmoothMap fd_lie_map(const detail::ObsSpec& spec, const LieWord& word, const Gravity& gravity,
                     double step) {
  SmoothMap map = obs_map(spec);
  const detail::Vec3<double> g = gvec(gravity);
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const detail::FieldId id = *it;
    const SmoothMap inner = map;
    map = {[inner, id, g, step](const Eigen::VectorXd& y) {
             return Eigen::VectorXd(numeric_jacobian(inner, y, step) *
                                    detail::to_eigen(detail::field_eval(id, detail::to_std(y), g)));
           },
           inner.out_dim};
  }
  return map;
}

}  // namespace

Eigen::VectorXd fd_lie_value(const detail::ObsSpec& spec, const LieWord& word,
                             const Eigen::VectorXd& x, const Gravity& gravity, double step) {
  return fd_lie_map(spec, word, gravity, step).eval(x);
}

Eigen::MatrixXd fd_lie_row(const detail::ObsSpec& spec, const LieWord& word,
                           const Eigen::VectorXd& x, const Gravity& gravity, double step) {
  return numeric_jacobian(fd_lie_map(spec, word, gravity, step), x, step);
}

}  // namespace obsvkit
