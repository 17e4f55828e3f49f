#include "obsvkit/scenario.hpp"

#include <cmath>

#include "json.hpp"
#include "obsvkit/constants.hpp"
#include "obsvkit/errors.hpp"
#include "obsvkit/geometry.hpp"

namespace obsvkit {

std::string degeneracy_name(Degeneracy d) {
  switch (d) {
    case Degeneracy::kNone:
      return "none";
    case Degeneracy::kCollinear:
      return "collinear";
    case Degeneracy::kNearZeroDepth:
      return "near_zero_depth";
  }
  return "none";
}

Degeneracy degeneracy_from_name(const std::string& name) {
  if (name == "none") return Degeneracy::kNone;
  if (name == "collinear") return Degeneracy::kCollinear;
  if (name == "near_zero_depth") return Degeneracy::kNearZeroDepth;
  throw InvalidConfig("unknown degeneracy '" + name + "'");
}

std::string mode_name(SystemMode m) {
  return m == SystemMode::kVins ? "vins" : "lins";
}

SystemMode mode_from_name(const std::string& name) {
  if (name == "vins") return SystemMode::kVins;
  if (name == "lins") return SystemMode::kLins;
  throw InvalidConfig("unknown system '" + name + "'");
}

double SplitMix64::gaussian() {
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

Eigen::Vector3d uniform_box(SplitMix64& rng, double half_width) {
  return {rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width),
          rng.uniform(-half_width, half_width)};
}

// Feature position in the sensor frame: positive depth, bearing within the
// field of view.
Eigen::Vector3d sample_sensor_feature(SplitMix64& rng, double depth_lo, double depth_hi) {
  const double pz = rng.uniform(depth_lo, depth_hi);
  const double px = rng.uniform(-0.8, 0.8) * pz;
  const double py = rng.uniform(-0.8, 0.8) * pz;
  return {px, py, pz};
}

double bearing_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double c = a.normalized().dot(b.normalized());
  return std::acos(std::min(1.0, std::max(-1.0, c)));
}

}  // namespace

Scenario sample_scenario(std::uint64_t seed, SystemMode mode, int n_features,
                         Degeneracy degeneracy) {
  if (n_features < 1) throw InvalidConfig("need at least one feature");
  if (degeneracy == Degeneracy::kCollinear && n_features < 2) {
    throw InvalidConfig("collinear geometry needs at least two features");
  }
  SplitMix64 rng(seed);
  Scenario sc;
  sc.mode = mode;
  sc.seed = seed;
  sc.degeneracy = degeneracy;

  State& st = sc.state;
  do {
    st.s = uniform_box(rng, 1.0);
  } while (st.s.norm() > 1.0);
  st.b_g = uniform_box(rng, 0.1);
  st.v = uniform_box(rng, 2.0);
  st.b_a = uniform_box(rng, 0.1);
  st.p_I = uniform_box(rng, 5.0);

  std::vector<Eigen::Vector3d> in_sensor(static_cast<std::size_t>(n_features));
  for (int i = 0; i < n_features; ++i) {
    int attempts = 0;
    for (;;) {
      const Eigen::Vector3d cand = sample_sensor_feature(rng, 0.5, 10.0);
      bool distinct = true;
      for (int j = 0; j < i; ++j) {
        if (bearing_angle(cand, in_sensor[static_cast<std::size_t>(j)]) <= kMinFeatureAngle) {
          distinct = false;
          break;
        }
      }
      if (distinct) {
        in_sensor[static_cast<std::size_t>(i)] = cand;
        break;
      }
      if (++attempts > 1000) throw InvalidConfig("could not place distinct features");
    }
  }
  if (degeneracy == Degeneracy::kCollinear) {
    const double lambda = rng.uniform(1.5, 3.0);
    in_sensor[1] = lambda * in_sensor[0];
  } else if (degeneracy == Degeneracy::kNearZeroDepth) {
    in_sensor[0] = sample_sensor_feature(rng, 5.0 * kPzMin, 20.0 * kPzMin);
  }
  const Eigen::Matrix3d Ct = cgr_rotation(st.s).transpose();
  st.features.resize(static_cast<std::size_t>(n_features));
  for (int i = 0; i < n_features; ++i) {
    st.features[static_cast<std::size_t>(i)] = st.p_I + Ct * in_sensor[static_cast<std::size_t>(i)];
  }

  for (int k = 0; k < 3; ++k) {
    InputSegment seg;
    seg.omega = uniform_box(rng, 1.0);
    seg.accel = uniform_box(rng, 5.0);
    seg.duration = rng.uniform(0.2, 0.5);
    sc.schedule.segments.push_back(seg);
  }
  return sc;
}

State perturb(const State& st, double scale, SplitMix64& rng) {
  Eigen::VectorXd x = st.flatten();
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += scale * rng.gaussian();
  return State::unflatten(x);
}

namespace {

nlohmann::json vec_json(const Eigen::Vector3d& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidConfig("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string canonical_json(const Scenario& sc) {
  nlohmann::json j;
  j["mode"] = mode_name(sc.mode);
  j["seed"] = sc.seed;
  j["degeneracy"] = degeneracy_name(sc.degeneracy);
  nlohmann::json st;
  st["s"] = vec_json(sc.state.s);
  st["b_g"] = vec_json(sc.state.b_g);
  st["v"] = vec_json(sc.state.v);
  st["b_a"] = vec_json(sc.state.b_a);
  st["p_I"] = vec_json(sc.state.p_I);
  st["features"] = nlohmann::json::array();
  for (const auto& f : sc.state.features) st["features"].push_back(vec_json(f));
  j["state"] = st;
  j["schedule"] = nlohmann::json::array();
  for (const auto& seg : sc.schedule.segments) {
    j["schedule"].push_back({{"omega", vec_json(seg.omega)},
                             {"accel", vec_json(seg.accel)},
                             {"duration", seg.duration}});
  }
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("scenario parse failure: ") + e.what());
  }
  try {
    Scenario sc;
    sc.mode = mode_from_name(j.at("mode").get<std::string>());
    sc.seed = j.at("seed").get<std::uint64_t>();
    sc.degeneracy = degeneracy_from_name(j.at("degeneracy").get<std::string>());
    const auto& st = j.at("state");
    sc.state.s = vec_from(st.at("s"));
    sc.state.b_g = vec_from(st.at("b_g"));
    sc.state.v = vec_from(st.at("v"));
    sc.state.b_a = vec_from(st.at("b_a"));
    sc.state.p_I = vec_from(st.at("p_I"));
    for (const auto& f : st.at("features")) sc.state.features.push_back(vec_from(f));
    for (const auto& seg : j.at("schedule")) {
      InputSegment s;
      s.omega = vec_from(seg.at("omega"));
      s.accel = vec_from(seg.at("accel"));
      s.duration = seg.at("duration").get<double>();
      sc.schedule.segments.push_back(s);
    }
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("scenario field failure: ") + e.what());
  }
}

}  // namespace obsvkit
