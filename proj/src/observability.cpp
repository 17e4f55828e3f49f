#include "obsvkit/observability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "obsvkit/dynamics.hpp"
#include "obsvkit/errors.hpp"
#include "obsvkit/geometry.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace obsvkit {

namespace {

Eigen::Vector3d unit(int i) { return Eigen::Vector3d::Unit(i); }

// Gradient of the normalized projection (x/z, y/z) with respect to the
// point in the sensor frame.
Eigen::Matrix<double, 2, 3> projection_jacobian(const Eigen::Vector3d& q) {
  Eigen::Matrix<double, 2, 3> h;
  h << 1.0 / q.z(), 0.0, -q.x() / (q.z() * q.z()),
       0.0, 1.0 / q.z(), -q.y() / (q.z() * q.z());
  return h;
}

detail::ObsSpec obs_spec(SystemMode mode, int feature) {
  return {mode == SystemMode::kVins ? detail::ObsKind::kCamera : detail::ObsKind::kLidar,
          feature};
}

}  // namespace

StructuralBlocks structural_blocks(const State& st, const Gravity& gravity) {
  const int n = st.dim();
  const Eigen::Matrix3d C = cgr_rotation(st.s);
  const Eigen::Matrix3d Jt = gibbs_rate_inverse(st.s);
  StructuralBlocks b;
  b.K.reserve(st.features.size());
  for (int i = 0; i < st.num_features(); ++i) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(3, n);
    const Eigen::Vector3d q = C * (st.features[static_cast<std::size_t>(i)] - st.p_I);
    K.block<3, 3>(0, 0) = skew(q) * Jt;
    K.block<3, 3>(0, 12) = -C;
    K.block<3, 3>(0, 15 + 3 * i) = C;
    b.K.push_back(std::move(K));
  }
  b.G = Eigen::MatrixXd::Zero(3, n);
  b.G.block<3, 3>(0, 0) = skew(C * st.v) * Jt;
  b.G.block<3, 3>(0, 6) = C;
  b.J = Eigen::MatrixXd::Zero(3, n);
  b.J.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
  b.M = Eigen::MatrixXd::Zero(3, n);
  b.M.block<3, 3>(0, 0) = skew(C * gravity.g) * Jt;
  b.N = Eigen::MatrixXd::Zero(3, n);
  b.N.block<3, 3>(0, 9) = Eigen::Matrix3d::Identity();
  return b;
}

std::vector<LieWord> default_row_words(SystemMode) {
  using detail::FieldId;
  using detail::FieldKind;
  const auto f0 = FieldId{FieldKind::kDrift, 0};
  const auto f1 = [](int i) { return FieldId{FieldKind::kGyro, i}; };
  const auto f2 = [](int i) { return FieldId{FieldKind::kAccel, i}; };
  std::vector<LieWord> words;
  words.push_back({});
  for (int i = 0; i < 3; ++i) words.push_back({f1(i)});
  words.push_back({f0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) words.push_back({f1(i), f1(j)});
  for (int j = 0; j < 3; ++j) words.push_back({f0, f1(j)});
  for (int i = 0; i < 3; ++i) words.push_back({f2(i), f0});
  for (int i = 0; i < 3; ++i) words.push_back({f1(i), f0});
  words.push_back({f0, f0});
  for (int k = 0; k < 3; ++k) words.push_back({f1(k), f0, f0});
  return words;
}

ObservabilityMatrix build_observability_matrix(const State& st, SystemMode mode,
                                               ExecPolicy exec, const Gravity& gravity) {
  const std::vector<LieWord> words = default_row_words(mode);
  const int n_feat = st.num_features();
  const int n_words = static_cast<int>(words.size());
  const int obs_dim = mode == SystemMode::kVins ? 2 : 3;
  const int per_feature = obs_dim * n_words;
  const Eigen::VectorXd x = st.flatten();

  ObservabilityMatrix out;
  out.rows.resize(per_feature * n_feat, st.dim());
  out.tags.resize(static_cast<std::size_t>(n_feat * n_words));

  std::exception_ptr first_error;
  const int total = n_feat * n_words;
#ifdef _OPENMP
  const bool parallel = exec == ExecPolicy::kParallel;
#else
  (void)exec;
  const bool parallel = false;
#endif
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int idx = 0; idx < total; ++idx) {
    const int feat = idx / n_words;
    const int w = idx % n_words;
    try {
      const Eigen::MatrixXd row = exact_lie_row(obs_spec(mode, feat), words[w], x, gravity);
      out.rows.middleRows(feat * per_feature + w * obs_dim, obs_dim) = row;
      out.tags[static_cast<std::size_t>(idx)] = {word_name(words[w]), feat, false, false};
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      {
        if (!first_error) first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

namespace {

struct FeatureContext {
  Eigen::Matrix3d C;
  Eigen::Vector3d q, Cv, b_g, b_a, Cg;
  double pz{0.0};
  Eigen::Matrix<double, 2, 3> H;
};

FeatureContext feature_context(const State& st, int feature, const Gravity& gravity) {
  FeatureContext c;
  c.C = cgr_rotation(st.s);
  c.q = c.C * (st.features[static_cast<std::size_t>(feature)] - st.p_I);
  c.Cv = c.C * st.v;
  c.b_g = st.b_g;
  c.b_a = st.b_a;
  c.Cg = c.C * gravity.g;
  c.pz = c.q.z();
  c.H = projection_jacobian(c.q);
  return c;
}

}  // namespace

ObservabilityMatrix analytic_vins_rows(const State& st, bool include_partial,
                                       const Gravity& gravity) {
  const StructuralBlocks blocks = structural_blocks(st, gravity);
  const int n = st.dim();
  const Eigen::Vector3d e3 = unit(2);

  ObservabilityMatrix out;
  const int base_rows = 24;                 // 12 two-row expressions per feature
  const int extra = include_partial ? 6 : 0;  // three partial two-row expressions
  out.rows.resize(st.num_features() * (base_rows + extra), n);
  int at = 0;
  auto push = [&](const Eigen::MatrixXd& rows, const std::string& tag, int feat, bool partial) {
    out.rows.middleRows(at, rows.rows()) = rows;
    out.tags.push_back({tag, feat, true, partial});
    at += static_cast<int>(rows.rows());
  };

  for (int feat = 0; feat < st.num_features(); ++feat) {
    const FeatureContext c = feature_context(st, feat, gravity);
    const Eigen::MatrixXd& K = blocks.K[static_cast<std::size_t>(feat)];
    const Eigen::MatrixXd& G = blocks.G;
    const Eigen::MatrixXd& J = blocks.J;
    const Eigen::MatrixXd& M = blocks.M;
    const Eigen::MatrixXd& N = blocks.N;
    const Eigen::Matrix3d Sq = skew(c.q);
    const auto& H = c.H;
    const double pz = c.pz;

    push(H * K, "reduced:h", feat, false);
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector3d ei = unit(i);
      push(-(H * Sq * ei / pz) * e3.transpose() * K - H * skew(ei) * K,
           "reduced:gyro_" + std::to_string(i + 1), feat, false);
    }
    push(-H * G - H * Sq * J + (H * c.Cv / pz) * e3.transpose() * K, "reduced:drift", feat,
         false);
    for (int i = 0; i < 3; ++i) {
      push((H * unit(i) / pz) * e3.transpose() * K, "reduced:accel_" + std::to_string(i + 1),
           feat, false);
    }
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d ek = unit(k);
      const double alpha = e3.dot(Sq * ek) / pz;
      const Eigen::Matrix<double, 2, 3> gcoef =
          H * skew(ek) + alpha * H + (H * Sq * ek / pz) * e3.transpose();
      const Eigen::Matrix<double, 2, 3> jcoef =
          -H * skew(Sq * ek) + alpha * H * Sq + (H * Sq * ek / pz) * e3.transpose() * Sq;
      const Eigen::Matrix<double, 2, 3> t =
          (H * skew(c.Cv) * ek / pz) * e3.transpose() -
          (2.0 * alpha / pz) * (H * c.Cv) * e3.transpose() -
          (H * c.Cv / pz) * e3.transpose() * skew(ek) -
          (e3.dot(c.Cv) / (pz * pz)) * (H * Sq * ek) * e3.transpose();
      push(gcoef * G + jcoef * J + t * K, "reduced:gyro_drift_" + std::to_string(k + 1), feat,
           false);
    }
    {
      const Eigen::Vector3d u = Sq * c.b_g + c.Cv;
      const double gam = e3.dot(u) / pz;
      const double beta = e3.dot(c.Cv) / pz;
      const Eigen::Vector3d w = skew(c.Cv) * c.b_g - c.Cg + c.b_a;
      const Eigen::Matrix<double, 2, 3> t1 =
          -H * (skew(c.b_g) + 2.0 * c.Cv * e3.transpose() / pz +
                (Sq * c.b_g) * e3.transpose() / pz + gam * Eigen::Matrix3d::Identity());
      Eigen::Matrix<double, 2, 3> t2 =
          H * skew(c.Cv) - (H * c.Cv / pz) * e3.transpose() * Sq;
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d ei = unit(i);
        t2 -= (gam * (H * Sq * ei) + (e3.dot(Sq * ei) / pz) * (H * u) + H * skew(ei) * u) *
              ei.transpose();
      }
      const Eigen::Matrix<double, 2, 3> t3 =
          -(H * w / pz) * e3.transpose() + (H * c.Cv / pz) * e3.transpose() * skew(c.b_g) +
          (2.0 * gam / pz) * (H * c.Cv) * e3.transpose() +
          (beta / pz) * (H * u) * e3.transpose();
      push(H * (N - M) + t1 * G + t2 * J + t3 * K, "reduced:drift_drift", feat, false);
    }
    if (include_partial) {
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d ek = unit(k);
        const Eigen::MatrixXd row =
            H * skew(ek) * M -
            (1.0 / pz) *
                (H * ((Sq * ek) * e3.transpose() + e3.dot(Sq * ek) * Eigen::Matrix3d::Identity())) *
                (N - M);
        push(row, "reduced:gyro_drift_drift_" + std::to_string(k + 1), feat, true);
      }
    }
  }
  return out;
}

ObservabilityMatrix analytic_lins_rows(const State& st, const Gravity& gravity) {
  const StructuralBlocks blocks = structural_blocks(st, gravity);
  const int n = st.dim();

  ObservabilityMatrix out;
  out.rows.resize(st.num_features() * 27, n);
  int at = 0;
  auto push = [&](const Eigen::MatrixXd& rows, const std::string& tag, int feat) {
    out.rows.middleRows(at, rows.rows()) = rows;
    out.tags.push_back({tag, feat, true, false});
    at += static_cast<int>(rows.rows());
  };

  for (int feat = 0; feat < st.num_features(); ++feat) {
    const FeatureContext c = feature_context(st, feat, gravity);
    const Eigen::MatrixXd& K = blocks.K[static_cast<std::size_t>(feat)];
    const Eigen::MatrixXd& G = blocks.G;
    const Eigen::MatrixXd& J = blocks.J;
    const Eigen::MatrixXd& M = blocks.M;
    const Eigen::MatrixXd& N = blocks.N;
    const Eigen::Matrix3d Sq = skew(c.q);
    const Eigen::Matrix3d Sb = skew(c.b_g);

    push(K, "reduced:h", feat);
    push(-Sq * J - G + Sb * K, "reduced:drift", feat);
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector3d ei = unit(i);
      push(-Sb * skew(ei) * K - skew(Sq * ei) * J + skew(ei) * G,
           "reduced:gyro_drift_" + std::to_string(i + 1), feat);
    }
    push(N - M - 2.0 * Sb * G + (skew(Sq * c.b_g) - Sb * Sq + 2.0 * skew(c.Cv)) * J +
             Sb * Sb * K,
         "reduced:drift_drift", feat);
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector3d ei = unit(i);
      const Eigen::Matrix3d jcoef =
          2.0 * skew(skew(c.Cv) * ei) - Sb * skew(Sq * ei) - skew(Sb * Sq * ei);
      push(skew(ei) * M + 2.0 * Sb * skew(ei) * G - Sb * Sb * skew(ei) * K + jcoef * J,
           "reduced:gyro_drift_drift_" + std::to_string(i + 1), feat);
    }
  }
  return out;
}

namespace {

// Exact numeric gradient rows for one feature, keyed the same way the
// recombination below consumes them.
struct NumericRows {
  Eigen::MatrixXd dh, f0, f0_f0;
  std::array<Eigen::MatrixXd, 3> f1, f2_f0, f1_f0, f0_f1;
  std::array<std::array<Eigen::MatrixXd, 3>, 3> f1_f1;
};

NumericRows numeric_rows_for(const State& st, SystemMode mode, int feat,
                             const Gravity& gravity) {
  using detail::FieldId;
  using detail::FieldKind;
  const auto f0 = FieldId{FieldKind::kDrift, 0};
  const auto f1 = [](int i) { return FieldId{FieldKind::kGyro, i}; };
  const auto f2 = [](int i) { return FieldId{FieldKind::kAccel, i}; };
  const Eigen::VectorXd x = st.flatten();
  const detail::ObsSpec spec = obs_spec(mode, feat);
  auto row = [&](const LieWord& w) { return exact_lie_row(spec, w, x, gravity); };

  NumericRows r;
  r.dh = row({});
  r.f0 = row({f0});
  r.f0_f0 = row({f0, f0});
  for (int i = 0; i < 3; ++i) {
    r.f1[static_cast<std::size_t>(i)] = row({f1(i)});
    r.f2_f0[static_cast<std::size_t>(i)] = row({f2(i), f0});
    r.f1_f0[static_cast<std::size_t>(i)] = row({f1(i), f0});
    r.f0_f1[static_cast<std::size_t>(i)] = row({f0, f1(i)});
    for (int j = 0; j < 3; ++j)
      r.f1_f1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = row({f1(i), f1(j)});
  }
  return r;
}

}  // namespace

ObservabilityMatrix recombined_rows_numeric(const State& st, SystemMode mode,
                                            const Gravity& gravity) {
  using detail::FieldId;
  using detail::FieldKind;
  const Eigen::Vector3d e3 = unit(2);

  if (mode == SystemMode::kLins) {
    // The lidar rows need no recombination: the closed forms match the raw
    // gradients directly.
    const auto f0 = FieldId{FieldKind::kDrift, 0};
    const auto f1 = [](int i) { return FieldId{FieldKind::kGyro, i}; };
    const Eigen::VectorXd x = st.flatten();
    ObservabilityMatrix out;
    out.rows.resize(st.num_features() * 27, st.dim());
    int at = 0;
    auto push = [&](const Eigen::MatrixXd& rows, const std::string& tag, int feat) {
      out.rows.middleRows(at, rows.rows()) = rows;
      out.tags.push_back({tag, feat, false, false});
      at += static_cast<int>(rows.rows());
    };
    for (int feat = 0; feat < st.num_features(); ++feat) {
      const detail::ObsSpec spec = obs_spec(mode, feat);
      auto row = [&](const LieWord& w) { return exact_lie_row(spec, w, x, gravity); };
      push(row({}), "reduced:h", feat);
      push(row({f0}), "reduced:drift", feat);
      for (int i = 0; i < 3; ++i)
        push(row({f1(i), f0}), "reduced:gyro_drift_" + std::to_string(i + 1), feat);
      push(row({f0, f0}), "reduced:drift_drift", feat);
      for (int i = 0; i < 3; ++i)
        push(row({f1(i), f0, f0}), "reduced:gyro_drift_drift_" + std::to_string(i + 1), feat);
    }
    return out;
  }

  ObservabilityMatrix out;
  out.rows.resize(st.num_features() * 24, st.dim());
  int at = 0;
  auto push = [&](const Eigen::MatrixXd& rows, const std::string& tag, int feat) {
    out.rows.middleRows(at, rows.rows()) = rows;
    out.tags.push_back({tag, feat, false, false});
    at += static_cast<int>(rows.rows());
  };

  for (int feat = 0; feat < st.num_features(); ++feat) {
    const FeatureContext c = feature_context(st, feat, gravity);
    const NumericRows r = numeric_rows_for(st, mode, feat, gravity);
    const Eigen::Matrix3d Sq = skew(c.q);
    const double pz = c.pz;
    const double beta = e3.dot(c.Cv) / pz;

    push(r.dh, "reduced:h", feat);
    for (int i = 0; i < 3; ++i) {
      push(r.f1[static_cast<std::size_t>(i)] + (e3.dot(Sq * unit(i)) / pz) * r.dh,
           "reduced:gyro_" + std::to_string(i + 1), feat);
    }
    {
      Eigen::MatrixXd row = r.f0 - beta * r.dh;
      for (int i = 0; i < 3; ++i) row += c.b_g[i] * r.f1[static_cast<std::size_t>(i)];
      push(row, "reduced:drift", feat);
    }
    for (int i = 0; i < 3; ++i) {
      push(r.f2_f0[static_cast<std::size_t>(i)] - (e3.dot(unit(i)) / pz) * r.dh,
           "reduced:accel_" + std::to_string(i + 1), feat);
    }
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d ek = unit(k);
      const double alpha = e3.dot(Sq * ek) / pz;
      const double corr = e3.dot(-skew(c.Cv) * ek + alpha * c.Cv) / pz;
      Eigen::MatrixXd row = r.f1_f0[static_cast<std::size_t>(k)] -
                            beta * r.f1[static_cast<std::size_t>(k)] + corr * r.dh;
      for (int i = 0; i < 3; ++i)
        row += c.b_g[i] * r.f1_f1[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      push(row, "reduced:gyro_drift_" + std::to_string(k + 1), feat);
    }
    {
      const Eigen::Vector3d u = Sq * c.b_g + c.Cv;
      const double gam = e3.dot(u) / pz;
      const Eigen::Vector3d w = skew(c.Cv) * c.b_g - c.Cg + c.b_a;
      const double sigma = e3.dot(w) / pz - gam * beta;
      Eigen::MatrixXd row = r.f0_f0 - beta * r.f0 + sigma * r.dh;
      for (int i = 0; i < 3; ++i) row += c.b_g[i] * r.f0_f1[static_cast<std::size_t>(i)];
      push(row, "reduced:drift_drift", feat);
    }
  }
  return out;
}

Eigen::MatrixXd constraint_matrix(const State& st, const Gravity& gravity) {
  const StructuralBlocks b = structural_blocks(st, gravity);
  const int n = st.dim();
  const int nf = st.num_features();
  Eigen::MatrixXd A(3 * nf + 12, n);
  for (int i = 0; i < nf; ++i) A.middleRows(3 * i, 3) = b.K[static_cast<std::size_t>(i)];
  A.middleRows(3 * nf + 0, 3) = b.G;
  A.middleRows(3 * nf + 3, 3) = b.J;
  A.middleRows(3 * nf + 6, 3) = b.N;
  A.middleRows(3 * nf + 9, 3) = b.M;
  return A;
}

Eigen::VectorXd constraint_left_null(const State& st, const Gravity& gravity) {
  const int nf = st.num_features();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(3 * nf + 12);
  const Eigen::Vector3d Cg = cgr_rotation(st.s) * gravity.g;
  c.tail<3>() = Cg.normalized();
  return c;
}

Eigen::MatrixXd theoretical_null_basis(const State& st, const Gravity& gravity) {
  const int n = st.dim();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, 4);
  for (int j = 0; j < 3; ++j) {
    B(12 + j, j) = 1.0;
    for (int i = 0; i < st.num_features(); ++i) B(15 + 3 * i + j, j) = 1.0;
  }
  const Eigen::Matrix3d C = cgr_rotation(st.s);
  const Eigen::Matrix3d Js = gibbs_rate(st.s);
  const Eigen::Matrix3d Sg = skew(gravity.g);
  B.block<3, 1>(0, 3) = Js * (C * gravity.g);
  B.block<3, 1>(6, 3) = -skew(st.v) * gravity.g;
  B.block<3, 1>(12, 3) = Sg * st.p_I;
  for (int i = 0; i < st.num_features(); ++i)
    B.block<3, 1>(15 + 3 * i, 3) = Sg * st.features[static_cast<std::size_t>(i)];
  return B;
}

NullspaceReport nullspace(const Eigen::MatrixXd& A, double rank_tol) {
  NullspaceReport rep;
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0) {
    rep.rank = 0;
    rep.null_dim = n;
    rep.null_basis = Eigen::MatrixXd::Identity(n, n);
    rep.singular_values = Eigen::VectorXd();
    return rep;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  rep.singular_values = svd.singularValues();
  const double top = rep.singular_values.size() > 0 ? rep.singular_values[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < rep.singular_values.size(); ++i)
    if (rep.singular_values[i] > rank_tol * top) ++rank;
  if (top == 0.0) rank = 0;
  rep.rank = rank;
  rep.null_dim = n - rank;
  rep.null_basis = svd.matrixV().rightCols(rep.null_dim);
  return rep;
}

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& A) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  return Eigen::MatrixXd(qr.householderQ()).leftCols(A.cols());
}

}  // namespace

double subspace_gap(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.cols() == 0) return 0.0;
  if (B.cols() == 0) return std::asin(1.0);
  const Eigen::MatrixXd qa = orthonormalize(A);
  const Eigen::MatrixXd qb = orthonormalize(B);
  const Eigen::MatrixXd resid = qa - qb * (qb.transpose() * qa);
  const double s = resid.jacobiSvd().singularValues()[0];
  return std::asin(std::min(1.0, s));
}

double projection_gradient_check(const State& st, SystemMode mode, const Gravity& gravity) {
  const StructuralBlocks blocks = structural_blocks(st, gravity);
  const Eigen::VectorXd x = st.flatten();
  double worst = 0.0;
  for (int feat = 0; feat < st.num_features(); ++feat) {
    const detail::ObsSpec spec = obs_spec(mode, feat);
    SmoothMap map{[spec](const Eigen::VectorXd& y) {
                    return detail::to_eigen(detail::obs_eval(spec, detail::to_std(y)));
                  },
                  spec.out_dim()};
    const Eigen::MatrixXd grad = numeric_jacobian(map, x);
    Eigen::MatrixXd expected;
    if (mode == SystemMode::kVins) {
      const Eigen::Vector3d q = feature_in_imu(x, feat);
      expected = projection_jacobian(q) * blocks.K[static_cast<std::size_t>(feat)];
    } else {
      expected = blocks.K[static_cast<std::size_t>(feat)];
    }
    const double scale = std::max(1.0, expected.cwiseAbs().maxCoeff());
    worst = std::max(worst, (grad - expected).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

StructureReport check_nullspace_structure(const State& st, SystemMode mode,
                                          const TolPolicy& tol, bool allow_degenerate,
                                          ExecPolicy exec, const Gravity& gravity) {
  StructureReport rep;
  rep.mode = mode;
  rep.state_dim = st.dim();
  rep.expected_null_dim = 4;

  const ObservabilityMatrix O = build_observability_matrix(st, mode, exec, gravity);
  const NullspaceReport ns = nullspace(O.rows, tol.rank_tol);
  rep.rank = ns.rank;
  rep.null_dim = ns.null_dim;

  if (ns.null_dim != rep.expected_null_dim) {
    if (!allow_degenerate) {
      throw HypothesisViolation("observability nullspace dimension " +
                                std::to_string(ns.null_dim) + " differs from the expected " +
                                std::to_string(rep.expected_null_dim));
    }
    rep.hypothesis_violated = true;
    rep.annotation = "nullspace dimension deviates from the generic value";
  }

  const Eigen::MatrixXd B = theoretical_null_basis(st, gravity);
  const double o_scale = std::max(1.0, O.rows.cwiseAbs().maxCoeff());
  const double b_scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  const double annihilation = (O.rows * B).cwiseAbs().maxCoeff() / (o_scale * b_scale);
  rep.span_gap = ns.null_dim == rep.expected_null_dim ? subspace_gap(B, ns.null_basis)
                                                      : std::asin(1.0);

  auto add = [&](const std::string& name, bool pass, double value, double bound) {
    rep.checks.push_back({name, pass, value, bound});
  };
  add("nullspace_dimension", ns.null_dim == rep.expected_null_dim,
      static_cast<double>(ns.null_dim), static_cast<double>(rep.expected_null_dim));
  add("rank", ns.rank == st.dim() - rep.expected_null_dim, static_cast<double>(ns.rank),
      static_cast<double>(st.dim() - rep.expected_null_dim));
  add("theoretical_directions_annihilated", annihilation <= tol.check_tol, annihilation,
      tol.check_tol);
  add("theoretical_span_gap", rep.span_gap <= tol.gap_tol, rep.span_gap, tol.gap_tol);

  const Eigen::MatrixXd A = constraint_matrix(st, gravity);
  const NullspaceReport cns = nullspace(A, kRankTolAnalytic);
  const int expected_crank = 3 * st.num_features() + 11;
  add("constraint_rank", cns.rank == expected_crank, static_cast<double>(cns.rank),
      static_cast<double>(expected_crank));
  const Eigen::VectorXd left = constraint_left_null(st, gravity);
  const double left_resid =
      (left.transpose() * A).cwiseAbs().maxCoeff() / std::max(1.0, A.cwiseAbs().maxCoeff());
  add("constraint_left_null", left_resid <= tol.check_tol, left_resid, tol.check_tol);

  return rep;
}

DegeneracyProbe degeneracy_probe(const State& st, SystemMode mode, double rank_tol,
                                 const Gravity& gravity) {
  DegeneracyProbe probe;
  const ObservabilityMatrix O =
      build_observability_matrix(st, mode, ExecPolicy::kParallel, gravity);
  probe.full_null_dim = nullspace(O.rows, rank_tol).null_dim;
  const ObservabilityMatrix R = mode == SystemMode::kVins ? analytic_vins_rows(st, false, gravity)
                                                          : analytic_lins_rows(st, gravity);
  probe.reduced_rows = static_cast<int>(R.rows.rows());
  probe.reduced_null_dim = nullspace(R.rows, rank_tol).null_dim;
  return probe;
}

}  // namespace obsvkit
