#include "pubsim/harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <locale>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pubsim/error.hpp"
#include "pubsim/frames.hpp"

namespace pubsim {

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, what);
}

void check_keys(const YAML::Node& node, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) config_error(section + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) config_error(section + ": unknown key '" + key + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    config_error(where + ": bad value '" + YAML::Dump(node) + "'");
  }
}

template <typename T>
void read(const YAML::Node& map, const char* key, T& out, const std::string& section) {
  if (const auto n = map[key]) out = scalar<T>(n, section + "." + key);
}

void read_deg(const YAML::Node& map, const char* key, double& out_rad,
              const std::string& section) {
  if (const auto n = map[key]) out_rad = deg_to_rad(scalar<double>(n, section + "." + key));
}

AirshipParams read_airship(const YAML::Node& n) {
  AirshipParams p = AirshipParams::prototype();
  if (!n) return p;
  const std::string s = "airship";
  check_keys(n, s, {"mass", "Ix", "Iy", "Iz", "Ixz", "cb_offset_d", "buoyancy", "net_lift",
                    "thruster_sx", "thruster_sz", "link_length", "yaw_damping_C2",
                    "drag_coefficient", "lift_slope", "moment_slope", "reference_chord",
                    "air_density"});
  read(n, "mass", p.mass, s);
  read(n, "Ix", p.Ix, s);
  read(n, "Iy", p.Iy, s);
  read(n, "Iz", p.Iz, s);
  read(n, "Ixz", p.Ixz, s);
  read(n, "cb_offset_d", p.cb_offset_d, s);
  read(n, "buoyancy", p.buoyancy, s);
  read(n, "net_lift", p.net_lift, s);
  read(n, "thruster_sx", p.thruster_sx, s);
  read(n, "thruster_sz", p.thruster_sz, s);
  read(n, "link_length", p.link_length, s);
  read(n, "yaw_damping_C2", p.yaw_damping_C2, s);
  read(n, "drag_coefficient", p.drag_coefficient, s);
  read(n, "lift_slope", p.lift_slope, s);
  read(n, "moment_slope", p.moment_slope, s);
  read(n, "reference_chord", p.reference_chord, s);
  read(n, "air_density", p.air_density, s);
  p.validate();
  return p;
}

BodyState read_initial(const YAML::Node& n) {
  BodyState x;
  if (!n) return x;
  const std::string s = "initial";
  check_keys(n, s, {"u", "v", "w", "p", "q", "r", "x", "y", "h", "phi_deg", "theta_deg",
                    "psi_deg"});
  read(n, "u", x.u, s);
  read(n, "v", x.v, s);
  read(n, "w", x.w, s);
  read(n, "p", x.p, s);
  read(n, "q", x.q, s);
  read(n, "r", x.r, s);
  read(n, "x", x.x_g, s);
  read(n, "y", x.y_g, s);
  read(n, "h", x.h, s);
  read_deg(n, "phi_deg", x.att.phi, s);
  read_deg(n, "theta_deg", x.att.theta, s);
  read_deg(n, "psi_deg", x.att.psi, s);
  return x;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() ? p : base / p;
}

OpenLoopConfig read_open_loop(const YAML::Node& n, const std::filesystem::path& base) {
  OpenLoopConfig cfg;
  const std::string s = "open_loop";
  check_keys(n, s, {"input", "throttle_map", "script"});
  if (const auto in = n["input"]) {
    const auto kind = scalar<std::string>(in, s + ".input");
    if (kind == "throttle") {
      cfg.throttle_input = true;
    } else if (kind != "thrust") {
      config_error(s + ".input must be 'thrust' or 'throttle'");
    }
  }
  if (cfg.throttle_input) {
    std::string map = "dual_ring_throttle";
    read(n, "throttle_map", map, s);
    try {
      cfg.throttle_map = thrust_map_preset(map);
    } catch (const Error&) {
      cfg.throttle_map = ThrustMap::load(resolve(base, map));
    }
  } else if (n["throttle_map"]) {
    config_error(s + ".throttle_map needs input: throttle");
  }
  const auto script = n["script"];
  if (!script || !script.IsSequence() || script.size() == 0) {
    config_error(s + ".script must be a non-empty list of [t, input, yaw_deg, pitch_deg]");
  }
  for (const auto& row : script) {
    if (!row.IsSequence() || row.size() < 2 || row.size() > 4) {
      config_error(s + ".script rows are [t, input] or [t, input, yaw_deg, pitch_deg]");
    }
    OpenLoopRow r;
    r.t = scalar<double>(row[0], s + ".script.t");
    r.input = scalar<double>(row[1], s + ".script.input");
    if (row.size() > 2) r.yaw_servo_deg = scalar<double>(row[2], s + ".script.yaw_deg");
    if (row.size() > 3) r.pitch_servo_deg = scalar<double>(row[3], s + ".script.pitch_deg");
    if (!cfg.script.empty() && !(r.t > cfg.script.back().t)) {
      config_error(s + ".script times must be strictly increasing");
    }
    cfg.script.push_back(r);
  }
  return cfg;
}

InnerLoopConfig read_inner_loop(const YAML::Node& n) {
  InnerLoopConfig cfg;
  const std::string s = "inner_loop";
  check_keys(n, s, {"trim", "gains", "speed_step", "step_time", "speed_loop"});
  if (const auto t = n["trim"]) {
    check_keys(t, s + ".trim", {"speed", "thrust", "delta_y0_deg", "delta_p0_deg"});
    read(t, "speed", cfg.trim.speed, s + ".trim");
    read(t, "thrust", cfg.trim.thrust, s + ".trim");
    read_deg(t, "delta_y0_deg", cfg.trim.delta_y0, s + ".trim");
    read_deg(t, "delta_p0_deg", cfg.trim.delta_p0, s + ".trim");
  }
  if (const auto g = n["gains"]) {
    check_keys(g, s + ".gains", {"k_u", "k_w", "k_1", "k_2"});
    read(g, "k_u", cfg.gains.k_u, s + ".gains");
    read(g, "k_w", cfg.gains.k_w, s + ".gains");
    read(g, "k_1", cfg.gains.k_1, s + ".gains");
    read(g, "k_2", cfg.gains.k_2, s + ".gains");
  }
  read(n, "speed_step", cfg.speed_step, s);
  read(n, "step_time", cfg.step_time, s);
  if (const auto l = n["speed_loop"]) {
    check_keys(l, s + ".speed_loop", {"numerator", "pole"});
    FirstOrderLoop loop;
    read(l, "numerator", loop.numerator, s + ".speed_loop");
    read(l, "pole", loop.pole, s + ".speed_loop");
    loop.k_u = cfg.gains.k_u;
    cfg.speed_loop = loop;
  }
  return cfg;
}

SmcConfig read_smc(const YAML::Node& n, const AirshipParams& airship,
                   const std::filesystem::path& base) {
  SmcConfig cfg;
  const std::string s = "smc";
  check_keys(n, s, {"model", "mass_matrix", "gains", "reference", "actuation",
                    "gimbal_limits_deg"});
  auto& m = cfg.model_params;
  m.mass = airship.mass;
  m.Iz = airship.Iz;
  if (const auto mn = n["model"]) {
    const std::string ms = s + ".model";
    check_keys(mn, ms, {"mass", "Iz", "m11", "m22", "m66", "x_G", "y_G", "X_u", "X_v", "X_r",
                        "Y_u", "Y_v", "Y_r", "N_u", "N_v", "N_r", "wind_u", "wind_v"});
    read(mn, "mass", m.mass, ms);
    read(mn, "Iz", m.Iz, ms);
    read(mn, "m11", m.m11, ms);
    read(mn, "m22", m.m22, ms);
    read(mn, "m66", m.m66, ms);
    read(mn, "x_G", m.x_G, ms);
    read(mn, "y_G", m.y_G, ms);
    read(mn, "X_u", m.X_u, ms);
    read(mn, "X_v", m.X_v, ms);
    read(mn, "X_r", m.X_r, ms);
    read(mn, "Y_u", m.Y_u, ms);
    read(mn, "Y_v", m.Y_v, ms);
    read(mn, "Y_r", m.Y_r, ms);
    read(mn, "N_u", m.N_u, ms);
    read(mn, "N_v", m.N_v, ms);
    read(mn, "N_r", m.N_r, ms);
    read(mn, "wind_u", m.wind_u, ms);
    read(mn, "wind_v", m.wind_v, ms);
  }
  if (const auto mm = n["mass_matrix"]) {
    const auto form = scalar<std::string>(mm, s + ".mass_matrix");
    if (form == "literal") {
      cfg.mass_matrix_literal = true;
    } else if (form != "symmetric") {
      config_error(s + ".mass_matrix must be 'symmetric' or 'literal'");
    }
  }
  if (const auto g = n["gains"]) {
    check_keys(g, s + ".gains", {"c1", "c2", "epsilon", "k", "boundary_layer"});
    read(g, "c1", cfg.gains.c1, s + ".gains");
    read(g, "c2", cfg.gains.c2, s + ".gains");
    read(g, "epsilon", cfg.gains.epsilon, s + ".gains");
    read(g, "k", cfg.gains.k, s + ".gains");
    read(g, "boundary_layer", cfg.gains.boundary_layer, s + ".gains");
  }
  const auto ref = n["reference"];
  if (!ref) config_error(s + ".reference is required");
  check_keys(ref, s + ".reference", {"file", "hold"});
  if (ref["file"] && ref["hold"]) config_error(s + ".reference: give either file or hold");
  if (const auto f = ref["file"]) {
    cfg.reference = ReferenceTrajectory::load(resolve(base, scalar<std::string>(f, s + ".reference.file")));
  } else if (const auto h = ref["hold"]) {
    check_keys(h, s + ".reference.hold", {"x", "y", "psi_deg"});
    double x = 0.0, y = 0.0, psi = 0.0;
    read(h, "x", x, s + ".reference.hold");
    read(h, "y", y, s + ".reference.hold");
    read_deg(h, "psi_deg", psi, s + ".reference.hold");
    cfg.reference = ReferenceTrajectory::constant(x, y, psi);
  } else {
    config_error(s + ".reference needs file or hold");
  }
  if (const auto a = n["actuation"]) {
    const auto kind = scalar<std::string>(a, s + ".actuation");
    if (kind == "vectored") {
      cfg.vectored_actuation = true;
    } else if (kind != "ideal") {
      config_error(s + ".actuation must be 'ideal' or 'vectored'");
    }
  }
  if (const auto l = n["gimbal_limits_deg"]) {
    check_keys(l, s + ".gimbal_limits_deg", {"yaw", "pitch"});
    read_deg(l, "yaw", cfg.limits.yaw, s + ".gimbal_limits_deg");
    read_deg(l, "pitch", cfg.limits.pitch, s + ".gimbal_limits_deg");
  }
  return cfg;
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    config_error(std::string("YAML parse error: ") + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_string(PlantModel model) {
  switch (model) {
    case PlantModel::Full: return "full";
    case PlantModel::Planar: return "planar";
    case PlantModel::Lateral: return "lateral";
    case PlantModel::Linear: return "linear";
  }
  return "unknown";
}

std::string to_string(ControllerKind controller) {
  switch (controller) {
    case ControllerKind::OpenLoop: return "open_loop";
    case ControllerKind::InnerLoop: return "inner_loop";
    case ControllerKind::Smc: return "smc";
  }
  return "unknown";
}

ReferenceTrajectory ReferenceTrajectory::constant(double x, double y, double psi) {
  ReferenceTrajectory r;
  r.t = {0.0};
  r.x = {x};
  r.y = {y};
  r.psi = {psi};
  return r;
}

ReferenceTrajectory ReferenceTrajectory::parse(const std::string& text) {
  ReferenceTrajectory r;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    double v[4];
    std::size_t n = 0;
    while (n < 4 && row >> v[n]) ++n;
    std::string rest;
    if (n == 0 && !(row.clear(), row >> rest)) continue;
    if (n != 4 || (row >> rest)) {
      config_error("reference line " + std::to_string(line_no) + ": expected t x y psi");
    }
    if (!r.t.empty() && !(v[0] > r.t.back())) {
      config_error("reference line " + std::to_string(line_no) + ": t must increase");
    }
    r.t.push_back(v[0]);
    r.x.push_back(v[1]);
    r.y.push_back(v[2]);
    r.psi.push_back(v[3]);
  }
  if (r.t.empty()) config_error("reference trajectory is empty");
  return r;
}

ReferenceTrajectory ReferenceTrajectory::load(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

void ReferenceTrajectory::sample(double time, Vec3& pose, Vec3& rate) const {
  if (t.empty()) throw Error(ErrorCode::InvalidArgument, "empty reference trajectory");
  rate.setZero();
  if (time <= t.front()) {
    pose = {x.front(), y.front(), psi.front()};
    return;
  }
  if (time >= t.back()) {
    pose = {x.back(), y.back(), psi.back()};
    return;
  }
  const auto hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), time) - t.begin());
  const std::size_t lo = hi - 1;
  const double span = t[hi] - t[lo];
  const double f = (time - t[lo]) / span;
  rate = {(x[hi] - x[lo]) / span, (y[hi] - y[lo]) / span, (psi[hi] - psi[lo]) / span};
  pose = {x[lo] + f * (x[hi] - x[lo]), y[lo] + f * (y[hi] - y[lo]),
          psi[lo] + f * (psi[hi] - psi[lo])};
}

void Scenario::validate() const {
  if (!(dt > 0.0)) config_error("simulation.dt must be > 0");
  if (!(duration >= dt)) config_error("simulation.duration must be >= dt");
  if (record_every == 0) config_error("simulation.record_every must be >= 1");
  if (!(max_thrust > 0.0)) config_error("thruster.max_thrust must be > 0");
  if (yaw_noise_deg < 0.0) config_error("disturbance.yaw_noise_deg must be >= 0");
  if (servo.min_deg < 0.0 || servo.max_deg > 180.0 || !(servo.min_deg <= servo.center_deg) ||
      !(servo.center_deg <= servo.max_deg) || servo.slew_deg_per_s < 0.0) {
    config_error("servo range must satisfy 0 <= min <= center <= max <= 180, slew >= 0");
  }
  airship.validate();
  if (model == PlantModel::Linear && controller != ControllerKind::InnerLoop) {
    config_error("the linear plant runs only with the inner_loop controller");
  }
  if (controller == ControllerKind::OpenLoop && open_loop.script.empty()) {
    config_error("open_loop controller needs an open_loop.script");
  }
  if (controller == ControllerKind::InnerLoop && !(inner_loop.trim.speed > 0.0)) {
    config_error("inner_loop.trim.speed must be > 0");
  }
  if (controller == ControllerKind::Smc) {
    smc.gains.validate();
    if (model == PlantModel::Lateral && smc.vectored_actuation && !(max_thrust > 0.0)) {
      config_error("vectored actuation needs max_thrust > 0");
    }
    if (model != PlantModel::Lateral && !smc.vectored_actuation) {
      config_error("rigid-body plants need smc.actuation: vectored");
    }
  }
}

Scenario parse_scenario(const std::string& yaml_text, const std::filesystem::path& base_dir) {
  const YAML::Node root = load_yaml(yaml_text);
  if (!root.IsMap()) config_error("scenario must be a YAML mapping");
  check_keys(root, "scenario", {"format", "simulation", "airship", "initial", "thruster", "servo",
                                "disturbance", "open_loop", "inner_loop", "smc", "output"});
  const auto fmt = root["format"];
  if (!fmt || scalar<std::string>(fmt, "format") != kScenarioFormat) {
    config_error(std::string("missing or unsupported format (expected ") + kScenarioFormat + ")");
  }

  Scenario sc;
  const auto sim = root["simulation"];
  if (!sim) config_error("simulation section is required");
  check_keys(sim, "simulation", {"model", "controller", "duration", "dt", "record_every", "seed"});
  const auto model = scalar<std::string>(sim["model"], "simulation.model");
  if (model == "full") sc.model = PlantModel::Full;
  else if (model == "planar") sc.model = PlantModel::Planar;
  else if (model == "lateral") sc.model = PlantModel::Lateral;
  else if (model == "linear") sc.model = PlantModel::Linear;
  else config_error("simulation.model must be full, planar, lateral or linear");
  const auto ctrl = scalar<std::string>(sim["controller"], "simulation.controller");
  if (ctrl == "open_loop") sc.controller = ControllerKind::OpenLoop;
  else if (ctrl == "inner_loop") sc.controller = ControllerKind::InnerLoop;
  else if (ctrl == "smc") sc.controller = ControllerKind::Smc;
  else config_error("simulation.controller must be open_loop, inner_loop or smc");
  sc.duration = scalar<double>(sim["duration"], "simulation.duration");
  read(sim, "dt", sc.dt, "simulation");
  read(sim, "record_every", sc.record_every, "simulation");
  read(sim, "seed", sc.seed, "simulation");

  sc.airship = read_airship(root["airship"]);
  sc.initial = read_initial(root["initial"]);

  if (const auto t = root["thruster"]) {
    check_keys(t, "thruster", {"max_thrust", "electrode_spacing"});
    read(t, "max_thrust", sc.max_thrust, "thruster");
    if (const auto e = t["electrode_spacing"]) {
      sc.electrode_spacing = scalar<double>(e, "thruster.electrode_spacing");
    }
  }
  if (const auto s = root["servo"]) {
    check_keys(s, "servo", {"center_deg", "min_deg", "max_deg", "slew_deg_per_s"});
    read(s, "center_deg", sc.servo.center_deg, "servo");
    read(s, "min_deg", sc.servo.min_deg, "servo");
    read(s, "max_deg", sc.servo.max_deg, "servo");
    read(s, "slew_deg_per_s", sc.servo.slew_deg_per_s, "servo");
  }
  if (const auto d = root["disturbance"]) {
    check_keys(d, "disturbance", {"yaw_noise_deg"});
    read(d, "yaw_noise_deg", sc.yaw_noise_deg, "disturbance");
  }
  if (const auto o = root["open_loop"]) sc.open_loop = read_open_loop(o, base_dir);
  if (const auto i = root["inner_loop"]) sc.inner_loop = read_inner_loop(i);
  sc.smc.model_params.mass = sc.airship.mass;
  sc.smc.model_params.Iz = sc.airship.Iz;
  if (const auto s = root["smc"]) sc.smc = read_smc(s, sc.airship, base_dir);
  if (sc.controller == ControllerKind::Smc && !root["smc"]) config_error("smc section is required");
  if (const auto out = root["output"]) {
    check_keys(out, "output", {"csv", "summary"});
    if (const auto c = out["csv"]) sc.output_csv = resolve(base_dir, scalar<std::string>(c, "output.csv"));
    if (const auto s = out["summary"]) {
      sc.output_summary = resolve(base_dir, scalar<std::string>(s, "output.summary"));
    }
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  Scenario sc = parse_scenario(read_text_file(path), path.parent_path().empty()
                                                    ? std::filesystem::path(".")
                                                    : path.parent_path());
  sc.source = path;
  return sc;
}

AirshipParams parse_airship(const std::string& yaml_text) {
  const YAML::Node root = load_yaml(yaml_text);
  if (!root || root.IsNull()) return AirshipParams::prototype();
  if (!root.IsMap()) config_error("parameter file must be a YAML mapping");
  return read_airship(root["airship"]);
}

ParamsFile parse_params(const std::string& yaml_text) {
  const YAML::Node root = load_yaml(yaml_text);
  ParamsFile out;
  if (!root || root.IsNull()) return out;
  check_keys(root, "params", {"airship", "trim"});
  out.airship = read_airship(root["airship"]);
  if (const auto t = root["trim"]) {
    check_keys(t, "trim", {"speed", "thrust", "delta_y0_deg", "delta_p0_deg"});
    read(t, "speed", out.trim.speed, "trim");
    read(t, "thrust", out.trim.thrust, "trim");
    read_deg(t, "delta_y0_deg", out.trim.delta_y0, "trim");
    read_deg(t, "delta_p0_deg", out.trim.delta_p0, "trim");
  }
  return out;
}

GainSpec parse_gain_spec(const std::string& yaml_text) {
  const YAML::Node root = load_yaml(yaml_text);
  if (!root || !root.IsMap()) config_error("gain file must be a YAML mapping");
  check_keys(root, "gain file", {"gains", "grid"});
  GainSpec spec;
  if (const auto g = root["gains"]) {
    check_keys(g, "gains", {"k_1", "k_2"});
    if (!g["k_1"] || !g["k_2"]) config_error("gains needs k_1 and k_2");
    spec.pair = std::make_pair(scalar<double>(g["k_1"], "gains.k_1"),
                               scalar<double>(g["k_2"], "gains.k_2"));
  }
  if (const auto g = root["grid"]) {
    check_keys(g, "grid", {"k_1", "k_2"});
    GainGrid grid;
    const auto axis = [&](const char* key, double& lo, double& hi, std::size_t& n) {
      const auto a = g[key];
      if (!a || !a.IsSequence() || a.size() != 3) {
        config_error(std::string("grid.") + key + " must be [min, max, steps]");
      }
      lo = scalar<double>(a[0], std::string("grid.") + key);
      hi = scalar<double>(a[1], std::string("grid.") + key);
      n = scalar<std::size_t>(a[2], std::string("grid.") + key);
      if (n == 0 || hi < lo) config_error(std::string("grid.") + key + ": need steps >= 1, max >= min");
    };
    axis("k_1", grid.k1_min, grid.k1_max, grid.k1_steps);
    axis("k_2", grid.k2_min, grid.k2_max, grid.k2_steps);
    spec.grid = grid;
  }
  if (spec.pair.has_value() == spec.grid.has_value()) {
    config_error("gain file needs exactly one of gains or grid");
  }
  return spec;
}

}  // namespace pubsim
