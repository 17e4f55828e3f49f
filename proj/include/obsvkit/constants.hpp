#pragma once

namespace obsvkit {

// Gibbs-vector chart guard; |s| = 10 is a rotation of about 168.6 deg,
// safely away from the 180 deg singularity.
inline constexpr double kSMax = 10.0;

// Minimum admissible camera depth (m).
inline constexpr double kPzMin = 1e-3;

// Central-difference step scale, about cbrt(machine epsilon).
inline constexpr double kFdStep = 6e-6;

// Default RK4 step (s).
inline constexpr double kDefaultDt = 1e-3;

// Rank cutoffs: sigma_i > rank_tol * sigma_1 counts toward rank.
inline constexpr double kRankTolAnalytic = 1e-8;
inline constexpr double kRankTolNumeric = 1e-6;

// Nullspace block-annihilation bound, relative to |n|.
inline constexpr double kCheckTol = 1e-6;

// Largest admissible principal angle between computed and closed-form
// nullspaces (rad).
inline constexpr double kGapTol = 1e-5;

// Lie-bracket residual bound, scaled by (1 + |x|).
inline constexpr double kBracketTol = 1e-5;

// Features count as collinear when their bearing angle is below this (rad).
inline constexpr double kMinFeatureAngle = 1e-3;

}  // namespace obsvkit
