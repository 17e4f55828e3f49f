#pragma once

#include <cstdint>
#include <string>

#include "obsvkit/lie.hpp"
#include "obsvkit/state.hpp"

namespace obsvkit {

// Deliberately degenerate feature geometry for stress runs.
enum class Degeneracy { kNone, kCollinear, kNearZeroDepth };

std::string degeneracy_name(Degeneracy d);
Degeneracy degeneracy_from_name(const std::string& name);  // throws InvalidConfig
std::string mode_name(SystemMode m);
SystemMode mode_from_name(const std::string& name);  // throws InvalidConfig

// Counter-based PRNG with published constants, so sampled scenarios are
// bit-identical across platforms and standard libraries.
struct SplitMix64 {
  std::uint64_t state{0};
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // 53-bit mantissa mapped to [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double gaussian();  // Box-Muller, one fresh pair per call
};

struct Scenario {
  SystemMode mode{SystemMode::kVins};
  std::uint64_t seed{0};
  Degeneracy degeneracy{Degeneracy::kNone};
  State state;
  InputSchedule schedule;
};

// Draws a state with bounded biases and velocity, features in front of the
// sensor with pairwise-distinct bearings, and a short piecewise-constant
// input schedule. Degenerate variants re-place the features afterwards.
Scenario sample_scenario(std::uint64_t seed, SystemMode mode, int n_features,
                         Degeneracy degeneracy = Degeneracy::kNone);

// Gaussian perturbation of every state block; scale 0 returns the input
// bit-identically.
State perturb(const State& st, double scale, SplitMix64& rng);

// Canonical serialization: fixed key order, round-trip-exact numbers.
std::string canonical_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

}  // namespace obsvkit
