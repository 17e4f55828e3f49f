#include <gtest/gtest.h>

#include "obsvkit/dynamics.hpp"
#include "obsvkit/geometry.hpp"
#include "obsvkit/observability.hpp"
#include "obsvkit/ocvins.hpp"
#include "obsvkit/scenario.hpp"

namespace obsvkit {
namespace {

TEST(GravityRotationDirection, HandComputedAtIdentityAttitude) {
  State st;
  st.v = {1.0, -2.0, 0.5};
  st.p_I = {3.0, 0.0, -1.0};
  st.features = {{0.0, 1.0, 4.0}, {2.0, 2.0, 2.0}};
  const Gravity gravity;
  const Eigen::VectorXd n = gravity_rotation_direction(st);
  EXPECT_EQ((n.segment<3>(0) - 0.5 * gravity.g).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(n.segment<3>(3).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((n.segment<3>(6) + skew(st.v) * gravity.g).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(n.segment<3>(9).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((n.segment<3>(12) - skew(gravity.g) * st.p_I).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((n.segment<3>(15) - skew(gravity.g) * st.features[0]).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((n.segment<3>(18) - skew(gravity.g) * st.features[1]).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GravityRotationDirection, MatchesNullBasisColumn) {
  const State st = sample_scenario(5, SystemMode::kVins, 2).state;
  const Eigen::VectorXd n = gravity_rotation_direction(st);
  const Eigen::MatrixXd B = theoretical_null_basis(st);
  EXPECT_EQ((n - B.col(3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ChartRateRoundtrip, ExactInverseOnRandomDraws) {
  SplitMix64 rng(7);
  for (int t = 0; t < 200; ++t) {
    Eigen::Vector3d s, u;
    for (int i = 0; i < 3; ++i) {
      s[i] = rng.uniform(-1.0, 1.0);
      u[i] = rng.uniform(-5.0, 5.0);
    }
    EXPECT_LT(chart_rate_roundtrip(s, u), 1e-12);
  }
}

TEST(ChartRateRoundtrip, RotatedGravityTransfersExactly) {
  const Gravity gravity;
  for (std::uint64_t seed = 20; seed < 40; ++seed) {
    const State st = sample_scenario(seed, SystemMode::kVins, 2).state;
    const Eigen::Vector3d Cg = cgr_rotation(st.s) * gravity.g;
    EXPECT_LT(chart_rate_roundtrip(st.s, Cg), 1e-12);
  }
}

TEST(Brackets, VanishForUnobservableDirections) {
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    const Scenario sc = sample_scenario(seed, seed % 2 ? SystemMode::kLins : SystemMode::kVins,
                                        2);
    const BracketReport rep = verify_brackets(sc.state);
    ASSERT_EQ(rep.checks.size(), 8u);  // drift + 6 controls + translation sweep
    for (const auto& c : rep.checks) {
      EXPECT_TRUE(c.pass) << c.field << " residual " << c.residual;
      EXPECT_LE(c.residual, kBracketTol);
    }
    EXPECT_TRUE(rep.pass());
  }
}

TEST(Brackets, CorruptedDirectionFailsLoudly) {
  for (std::uint64_t seed = 60; seed < 64; ++seed) {
    const BracketReport rep = verify_brackets(sample_scenario(seed, SystemMode::kVins, 2).state);
    EXPECT_GT(rep.mutation_residual, 1e-2);
    EXPECT_GT(rep.mutation_residual, 100.0 * kBracketTol);
  }
}

TEST(Brackets, TranslationFieldCommutesDirectly) {
  const State st = sample_scenario(65, SystemMode::kVins, 2).state;
  const int nf = st.num_features();
  const VectorField t0 = [nf](const Eigen::VectorXd& y) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(y.size());
    d[12] = 1.0;
    for (int i = 0; i < nf; ++i) d[15 + 3 * i] = 1.0;
    return d;
  };
  EXPECT_LT(max_bracket_residual(st, t0), kBracketTol);
}

TEST(FlowInvariance, SpanCarriedAlongTrajectory) {
  for (std::uint64_t seed = 70; seed < 74; ++seed) {
    const Scenario sc = sample_scenario(seed, SystemMode::kVins, 2);
    const FlowInvarianceReport rep =
        verify_flow_invariance(sc.state, sc.schedule, kDefaultDt);
    EXPECT_TRUE(rep.pass) << "seed " << seed << " gap " << rep.gap;
    EXPECT_LE(rep.gap, kGapTol);
    EXPECT_LT(rep.direction_residual, kGapTol);
    EXPECT_NEAR(rep.duration, sc.schedule.total_duration(), 0.0);
  }
}

TEST(FlowInvariance, ResidualShrinksWithStepForExactBackend) {
  InputSchedule sched;
  sched.segments.push_back({{0.3, -0.2, 0.4}, {1.0, -2.0, 0.5}, 0.3});
  sched.segments.push_back({{-0.5, 0.1, 0.2}, {0.5, 1.5, -1.0}, 0.3});
  const State st = sample_scenario(80, SystemMode::kVins, 2).state;

  const FlowInvarianceReport coarse =
      verify_flow_invariance(st, sched, 0.01, DfBackend::kForwardAd);
  const FlowInvarianceReport fine =
      verify_flow_invariance(st, sched, 0.005, DfBackend::kForwardAd);
  EXPECT_LE(fine.direction_residual, coarse.direction_residual);
  if (coarse.direction_residual > 1e-10) {
    // Fourth-order integrator: halving the step should cut the defect by
    // roughly sixteen; demand at least a factor four.
    EXPECT_GT(coarse.direction_residual / fine.direction_residual, 4.0);
  }
}

TEST(FlowInvariance, BackendsAgreeAtModerateStep) {
  const Scenario sc = sample_scenario(81, SystemMode::kLins, 1);
  const FlowInvarianceReport ad =
      verify_flow_invariance(sc.state, sc.schedule, kDefaultDt, DfBackend::kForwardAd);
  const FlowInvarianceReport fd =
      verify_flow_invariance(sc.state, sc.schedule, kDefaultDt, DfBackend::kCentralFd);
  EXPECT_TRUE(ad.pass);
  EXPECT_TRUE(fd.pass);
  EXPECT_LT(std::abs(ad.gap - fd.gap), kGapTol);
}

TEST(FlowInvariance, TranslationsPushForwardBitExactly) {
  const Scenario sc = sample_scenario(82, SystemMode::kVins, 2);
  const Eigen::VectorXd x0 = sc.state.flatten();
  const Eigen::MatrixXd B = theoretical_null_basis(sc.state);
  for (const auto backend : {DfBackend::kForwardAd, DfBackend::kCentralFd}) {
    const FlowWithJacobian fj = flow_jacobian(x0, sc.schedule, kDefaultDt, backend);
    for (int j = 0; j < 3; ++j) {
      // The dynamics never read positions, so translation columns ride
      // through the variational integrator untouched.
      EXPECT_EQ((fj.M * B.col(j) - B.col(j)).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(FlowInvariance, MutatedDirectionBreaksInvariance) {
  const Scenario sc = sample_scenario(83, SystemMode::kVins, 2);
  const Eigen::VectorXd x0 = sc.state.flatten();
  const FlowWithJacobian fj = flow_jacobian(x0, sc.schedule, kDefaultDt);
  const State end_state = State::unflatten(fj.x);
  const Eigen::VectorXd pushed = fj.M * corrupted_direction(sc.state);
  const Eigen::VectorXd recomputed = corrupted_direction(end_state);
  EXPECT_GT((pushed - recomputed).norm() / recomputed.norm(), 1e-3);
}

}  // namespace
}  // namespace obsvkit
