#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "obsvkit/constants.hpp"
#include "obsvkit/lie.hpp"
#include "obsvkit/state.hpp"

namespace obsvkit {

enum class ExecPolicy { kSerial, kParallel };

// Recurring gradient blocks of the observation chain, each 3 x dim in the
// flat state layout. K[i] is the gradient of the i-th feature position in
// the IMU frame; G, J, M, N are the gradients of rotated velocity, gyro
// bias, rotated gravity, and accel bias contributions that the closed-form
// row expressions combine.
struct StructuralBlocks {
  std::vector<Eigen::MatrixXd> K;
  Eigen::MatrixXd G, J, M, N;
};

StructuralBlocks structural_blocks(const State& st, const Gravity& gravity = {});

struct RowTag {
  std::string word;    // Lie word the row came from, or a reduced-row label
  int feature{0};      // observation the row differentiates
  bool analytic{false};  // built from closed-form block expressions
  bool partial{false};   // omits terms lying in the span of lower-order rows
};

struct ObservabilityMatrix {
  Eigen::MatrixXd rows;
  std::vector<RowTag> tags;
};

// Words defining the codistribution: all iterated Lie derivatives up to the
// order needed to expose the bias and velocity couplings (length <= 3).
std::vector<LieWord> default_row_words(SystemMode mode);

// Stacks the exact gradient of every (word, feature) pair. Parallel and
// serial policies produce bit-identical results; rows are ordered feature-
// major then word-major regardless of policy.
ObservabilityMatrix build_observability_matrix(const State& st, SystemMode mode,
                                               ExecPolicy exec = ExecPolicy::kParallel,
                                               const Gravity& gravity = {});

// Closed-form rows assembled from the structural blocks. These span the same
// codistribution as the numeric rows after bias/velocity recombination. The
// optional partial row for the camera system drops terms already spanned by
// lower-order rows and is only meaningful inside span checks.
ObservabilityMatrix analytic_vins_rows(const State& st, bool include_partial = false,
                                       const Gravity& gravity = {});
ObservabilityMatrix analytic_lins_rows(const State& st, const Gravity& gravity = {});

// The same recombined rows built numerically from exact Lie-derivative
// gradients, without using the closed forms; oracle for the analytic rows.
ObservabilityMatrix recombined_rows_numeric(const State& st, SystemMode mode,
                                            const Gravity& gravity = {});

// Stacked block constraint system whose rank certifies that the structural
// blocks leave exactly one direction undetermined (rotation about gravity).
Eigen::MatrixXd constraint_matrix(const State& st, const Gravity& gravity = {});
Eigen::VectorXd constraint_left_null(const State& st, const Gravity& gravity = {});

// Expected unobservable directions: three global translations and the
// rotation about gravity, as columns (dim x 4).
Eigen::MatrixXd theoretical_null_basis(const State& st, const Gravity& gravity = {});

struct NullspaceReport {
  int rank{0};
  int null_dim{0};
  Eigen::MatrixXd null_basis;         // dim x null_dim, orthonormal
  Eigen::VectorXd singular_values;
};

NullspaceReport nullspace(const Eigen::MatrixXd& A, double rank_tol = kRankTolAnalytic);

// Largest principal angle (radians) by which span(A) sticks out of span(B).
double subspace_gap(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Residual of the numeric observation gradients against their structured
// factorization through the feature-position blocks; max over features,
// scaled by the gradient norm.
double projection_gradient_check(const State& st, SystemMode mode,
                                 const Gravity& gravity = {});

struct TolPolicy {
  double rank_tol{kRankTolAnalytic};
  double check_tol{kCheckTol};
  double gap_tol{kGapTol};
};

struct CheckItem {
  std::string name;
  bool pass{false};
  double value{0.0};  // measured residual / dimension
  double bound{0.0};  // threshold it was compared against
};

struct StructureReport {
  SystemMode mode{SystemMode::kVins};
  int state_dim{0};
  int rank{0};
  int null_dim{0};
  int expected_null_dim{4};
  double span_gap{0.0};
  std::vector<CheckItem> checks;
  bool hypothesis_violated{false};
  std::string annotation;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Full verification at one state: nullspace dimension, rank-nullity split,
// agreement with the theoretical directions, row annihilation, and the
// constraint-system rank. With allow_degenerate=false a nullspace dimension
// other than the expected one throws HypothesisViolation; with it set, the
// report is annotated instead and degenerate geometry is analyzed further.
StructureReport check_nullspace_structure(const State& st, SystemMode mode,
                                          const TolPolicy& tol = {},
                                          bool allow_degenerate = false,
                                          ExecPolicy exec = ExecPolicy::kParallel,
                                          const Gravity& gravity = {});

// Dimensions that discriminate degenerate feature geometry: the full
// codistribution keeps its generic nullity even for collinear features, while
// the closed-form recombined system gains a direction.
struct DegeneracyProbe {
  int full_null_dim{0};
  int reduced_null_dim{0};
  int reduced_rows{0};
};

DegeneracyProbe degeneracy_probe(const State& st, SystemMode mode,
                                 double rank_tol = kRankTolAnalytic,
                                 const Gravity& gravity = {});

}  // namespace obsvkit
