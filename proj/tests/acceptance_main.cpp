// Acceptance gate: one line per criterion, nonzero exit if any fail.
// Runs the full property battery at the documented scale and tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "obsvkit/dynamics.hpp"
#include "obsvkit/errors.hpp"
#include "obsvkit/geometry.hpp"
#include "obsvkit/observability.hpp"
#include "obsvkit/ocvins.hpp"
#include "obsvkit/scenario.hpp"

namespace {

using namespace obsvkit;

struct Line {
  bool pass{false};
  std::string text;
};

std::vector<Line> g_lines;

void record(int id, bool pass, const std::string& detail) {
  char head[64];
  std::snprintf(head, sizeof(head), "[%s] criterion %d: ", pass ? "PASS" : "FAIL", id);
  g_lines.push_back({pass, head + detail});
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start{std::chrono::steady_clock::now()};
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Eigen::Matrix<double, 2, 3> proj_jac(const Eigen::Vector3d& q) {
  Eigen::Matrix<double, 2, 3> h;
  h << 1.0 / q.z(), 0.0, -q.x() / (q.z() * q.z()),
       0.0, 1.0 / q.z(), -q.y() / (q.z() * q.z());
  return h;
}

struct ModeSweep {
  int rank_failures{0};
  int dim_failures{0};
  double worst_gap{0.0};
  double worst_block_residual{0.0};
  double seconds{0.0};
};

// Shared by criteria 1/2/3/9: nullspace dimension, constraint rank, span gap,
// and structural-block annihilation of every computed null vector.
ModeSweep sweep_mode(SystemMode mode, int n_features, int trials, std::uint64_t seed0) {
  Timer timer;
  ModeSweep out;
  for (int t = 0; t < trials; ++t) {
    const State st = sample_scenario(seed0 + static_cast<std::uint64_t>(t), mode,
                                     n_features).state;
    const ObservabilityMatrix O = build_observability_matrix(st, mode);
    const NullspaceReport ns = nullspace(O.rows);
    if (ns.null_dim != 4) ++out.dim_failures;

    const NullspaceReport cns = nullspace(constraint_matrix(st));
    if (cns.rank != 3 * st.num_features() + 11) ++out.rank_failures;

    out.worst_gap = std::max(out.worst_gap,
                             subspace_gap(theoretical_null_basis(st), ns.null_basis));

    const StructuralBlocks b = structural_blocks(st);
    for (int j = 0; j < ns.null_dim; ++j) {
      const Eigen::VectorXd n = ns.null_basis.col(j);
      double r = std::max((b.G * n).norm(), (b.J * n).norm());
      r = std::max(r, (b.M * n).norm());
      r = std::max(r, (b.N * n).norm());
      for (const auto& K : b.K) r = std::max(r, (K * n).norm());
      out.worst_block_residual = std::max(out.worst_block_residual, r / n.norm());
    }
  }
  out.seconds = timer.seconds();
  return out;
}

void criteria_1_2_3_9() {
  const ModeSweep cam = sweep_mode(SystemMode::kVins, 2, 50, 1000);
  const ModeSweep lid = sweep_mode(SystemMode::kLins, 1, 50, 2000);

  record(1,
         cam.rank_failures == 0 && cam.dim_failures == 0 && cam.seconds < 30.0,
         "50 camera scenarios: constraint rank 17 and nullspace dimension 4 on every trial (" +
             fmt(cam.seconds) + " s)");
  record(2, cam.worst_gap <= 1e-5,
         "camera nullspace-to-theoretical span gap <= 1e-5 on every trial (max " +
             fmt(cam.worst_gap) + " rad)");
  record(3,
         lid.rank_failures == 0 && lid.dim_failures == 0 && lid.worst_gap <= 1e-5 &&
             lid.seconds < 15.0,
         "50 lidar scenarios: nullspace dimension 4, span gap max " + fmt(lid.worst_gap) +
             " rad (" + fmt(lid.seconds) + " s)");
  const double worst_block = std::max(cam.worst_block_residual, lid.worst_block_residual);
  record(9, worst_block <= 1e-6,
         "every computed null vector annihilated by all structural blocks (max " +
             fmt(worst_block) + ")");
}

// Closed-form rows against numeric recombination, plus the measured deviation
// of two legacy sub-term variants of the camera drift-drift row that are kept
// only as diagnostics; the shipped forms must match.
void criterion_4() {
  double worst = 0.0, worst_alt2 = 0.0, worst_alt3 = 0.0;
  const Eigen::Vector3d e3 = Eigen::Vector3d::Unit(2);
  const Gravity gravity;

  for (std::uint64_t seed = 3000; seed < 3050; ++seed) {
    const State cam = sample_scenario(seed, SystemMode::kVins, 2).state;
    const ObservabilityMatrix a = analytic_vins_rows(cam);
    const ObservabilityMatrix n = recombined_rows_numeric(cam, SystemMode::kVins);
    worst = std::max(worst, (a.rows - n.rows).cwiseAbs().maxCoeff() /
                                std::max(1.0, n.rows.cwiseAbs().maxCoeff()));

    const State lid = sample_scenario(seed, SystemMode::kLins, 1).state;
    const ObservabilityMatrix la = analytic_lins_rows(lid);
    const ObservabilityMatrix ln = recombined_rows_numeric(lid, SystemMode::kLins);
    worst = std::max(worst, (la.rows - ln.rows).cwiseAbs().maxCoeff() /
                                std::max(1.0, ln.rows.cwiseAbs().maxCoeff()));

    const StructuralBlocks blocks = structural_blocks(cam);
    const Eigen::Matrix3d C = cgr_rotation(cam.s);
    for (int feat = 0; feat < 2; ++feat) {
      const Eigen::Vector3d q = C * (cam.features[static_cast<std::size_t>(feat)] - cam.p_I);
      const double pz = q.z();
      const Eigen::Matrix<double, 2, 3> H = proj_jac(q);
      const Eigen::Matrix3d Sq = skew(q);
      const Eigen::Vector3d Cv = C * cam.v;
      const Eigen::Vector3d u = Sq * cam.b_g + Cv;
      const double gam = e3.dot(u) / pz;
      const double beta = e3.dot(Cv) / pz;
      const Eigen::Vector3d w = skew(Cv) * cam.b_g - C * gravity.g + cam.b_a;

      const Eigen::Matrix<double, 2, 3> t1 =
          -H * (skew(cam.b_g) + 2.0 * Cv * e3.transpose() / pz +
                (Sq * cam.b_g) * e3.transpose() / pz + gam * Eigen::Matrix3d::Identity());
      Eigen::Matrix<double, 2, 3> t2 = H * skew(Cv) - (H * Cv / pz) * e3.transpose() * Sq;
      Eigen::Matrix<double, 2, 3> t2_alt =
          -H * ((Cv / pz) * e3.transpose() * Sq - skew(Cv));
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d ei = Eigen::Vector3d::Unit(i);
        t2 -= (gam * (H * Sq * ei) + (e3.dot(Sq * ei) / pz) * (H * u) + H * skew(ei) * u) *
              ei.transpose();
        t2_alt -= (H *
                   (skew(ei) + (Sq * ei / pz) * e3.transpose() -
                    (e3.dot(Sq * ei) / pz) * Eigen::Matrix3d::Identity()) *
                   u) *
                  ei.transpose();
      }
      const Eigen::Matrix<double, 2, 3> t3 =
          -(H * w / pz) * e3.transpose() + (H * Cv / pz) * e3.transpose() * skew(cam.b_g) +
          (2.0 * gam / pz) * (H * Cv) * e3.transpose() +
          (beta / pz) * (H * u) * e3.transpose();
      const Eigen::Matrix<double, 2, 3> t3_alt =
          H * ((2.0 * gam / pz) * Cv * e3.transpose() + (beta / pz) * e3 * e3.transpose()) -
          (1.0 / pz) * (H * w) * e3.transpose();

      const Eigen::MatrixXd& K = blocks.K[static_cast<std::size_t>(feat)];
      const Eigen::MatrixXd base = H * (blocks.N - blocks.M) + t1 * blocks.G;
      const Eigen::MatrixXd reference = n.rows.middleRows(feat * 24 + 22, 2);
      const double scale = std::max(1.0, reference.cwiseAbs().maxCoeff());
      worst_alt2 = std::max(
          worst_alt2,
          (base + t2_alt * blocks.J + t3 * K - reference).cwiseAbs().maxCoeff() / scale);
      worst_alt3 = std::max(
          worst_alt3,
          (base + t2 * blocks.J + t3_alt * K - reference).cwiseAbs().maxCoeff() / scale);
    }
  }
  record(4, worst <= 1e-5,
         "closed-form rows match numeric recombination over 100 scenarios (max " + fmt(worst) +
             "); legacy drift-drift sub-term variants deviate by " + fmt(worst_alt2) + " / " +
             fmt(worst_alt3) + " and stay diagnostics-only");
}

// Projection-derivative factorization (finite-difference limited) and the
// cyclic cross-product identity at closed-form precision.
void criterion_5() {
  double worst_proj = 0.0, worst_cross = 0.0;
  const Eigen::Vector3d e3 = Eigen::Vector3d::Unit(2);
  SplitMix64 rng(77);

  for (int t = 0; t < 1000; ++t) {
    const State st = sample_scenario(5000 + static_cast<std::uint64_t>(t), SystemMode::kVins,
                                     2).state;
    const Eigen::VectorXd x = st.flatten();
    const Eigen::Vector3d v{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                            rng.uniform(-2.0, 2.0)};
    const SmoothMap hv{[v](const Eigen::VectorXd& y) {
                         return Eigen::VectorXd(proj_jac(feature_in_imu(y, 0)) * v);
                       },
                       2};
    const Eigen::MatrixXd lhs = numeric_jacobian(hv, x);
    const Eigen::Vector3d q = feature_in_imu(x, 0);
    const Eigen::Matrix<double, 2, 3> H = proj_jac(q);
    const Eigen::MatrixXd K = structural_blocks(st).K[0];
    const Eigen::MatrixXd rhs =
        -(1.0 / q.z()) * (H * v) * (e3.transpose() * K) - (e3.dot(v) / q.z()) * (H * K);
    worst_proj = std::max(worst_proj, (lhs - rhs).cwiseAbs().maxCoeff() /
                                          std::max(1.0, rhs.cwiseAbs().maxCoeff()));

    Eigen::Vector3d a, b, c;
    for (int i = 0; i < 3; ++i) {
      a[i] = rng.uniform(-1.0, 1.0);
      b[i] = rng.uniform(-1.0, 1.0);
      c[i] = rng.uniform(-1.0, 1.0);
    }
    const Eigen::Vector3d cyc =
        skew(skew(a) * b) * c + skew(skew(b) * c) * a + skew(skew(c) * a) * b;
    worst_cross = std::max(worst_cross, cyc.cwiseAbs().maxCoeff());
  }
  record(5, worst_proj <= 1e-5 && worst_cross <= 1e-13,
         "projection-derivative factorization max " + fmt(worst_proj) +
             " and cyclic cross-product identity max " + fmt(worst_cross) +
             " over 1000 draws");
}

void criterion_6() {
  double worst = 0.0;
  double mutation_floor = 1e300;
  for (std::uint64_t seed = 6000; seed < 6100; ++seed) {
    const BracketReport rep = verify_brackets(sample_scenario(seed, SystemMode::kVins, 2).state);
    for (const auto& c : rep.checks) worst = std::max(worst, c.residual);
    mutation_floor = std::min(mutation_floor, rep.mutation_residual);
  }
  record(6, worst <= 1e-5 && mutation_floor > 1e-2,
         "symmetry brackets <= 1e-5 over 100 scenarios (max " + fmt(worst) +
             "); corrupted direction rejected at " + fmt(mutation_floor));
}

void criterion_7() {
  double worst_full = 0.0, worst_half = 0.0;
  bool monotone = true;
  int done = 0, skipped = 0;
  std::uint64_t seed = 7000;
  constexpr double kFloor = 1e-10;

  while (done < 20 && skipped < 40) {
    Scenario sc = sample_scenario(seed++, SystemMode::kVins, 2);
    double total = sc.schedule.total_duration();
    for (auto& seg : sc.schedule.segments) seg.duration /= total;  // exactly 1 s
    try {
      const FlowInvarianceReport full =
          verify_flow_invariance(sc.state, sc.schedule, 1e-3);
      const FlowInvarianceReport half =
          verify_flow_invariance(sc.state, sc.schedule, 5e-4);
      worst_full = std::max(worst_full, full.gap);
      worst_half = std::max(worst_half, half.gap);
      if (half.gap > full.gap && half.gap > kFloor) monotone = false;
      ++done;
    } catch (const ChartExitError&) {
      ++skipped;  // rotation left the chart's safe region; property not defined
    }
  }
  record(7, done == 20 && worst_full <= 1e-5 && worst_half <= 1e-5 && monotone,
         "flow invariance at t=1 s, dt=1e-3 over 20 scenarios (max gap " + fmt(worst_full) +
             "); halving dt does not increase it (max " + fmt(worst_half) + ", " +
             std::to_string(skipped) + " chart-exit skips)");
}

void criterion_8() {
  const Gravity gravity;
  double worst = 0.0;
  for (std::uint64_t seed = 8000; seed < 8100; ++seed) {
    const State st = sample_scenario(seed, SystemMode::kVins, 2).state;
    const Eigen::Vector3d Cg = cgr_rotation(st.s) * gravity.g;
    worst = std::max(worst, chart_rate_roundtrip(st.s, Cg));
  }
  record(8, worst <= 1e-12,
         "chart-rate transfer of the rotated gravity axis over 100 scenarios (max " +
             fmt(worst) + ")");
}

void criterion_10() {
  int discriminated = 0;
  int full_dim_deviations = 0;
  for (std::uint64_t seed = 9000; seed < 9050; ++seed) {
    const State degen =
        sample_scenario(seed, SystemMode::kVins, 2, Degeneracy::kCollinear).state;
    const State twin = sample_scenario(seed, SystemMode::kVins, 2).state;
    const DegeneracyProbe probe = degeneracy_probe(degen, SystemMode::kVins);
    const DegeneracyProbe base = degeneracy_probe(twin, SystemMode::kVins);
    if (probe.reduced_null_dim > base.reduced_null_dim) ++discriminated;
    if (probe.full_null_dim != 4) ++full_dim_deviations;
  }
  record(10, discriminated >= 45,
         "collinear features detected by closed-form rank drop in " +
             std::to_string(discriminated) + "/50 trials (full nullspace dimension deviates in " +
             std::to_string(full_dim_deviations) + "/50)");
}

}  // namespace

int main() {
  criteria_1_2_3_9();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_10();

  int failures = 0;
  // Criteria were gathered out of order; print sorted by id for readability.
  for (int id = 1; id <= 10; ++id) {
    for (const auto& line : g_lines) {
      const std::string tag = "criterion " + std::to_string(id) + ":";
      if (line.text.find(tag) != std::string::npos) {
        std::printf("%s\n", line.text.c_str());
        if (!line.pass) ++failures;
      }
    }
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
